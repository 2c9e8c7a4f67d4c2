#include "fdl/records.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace fdl {

std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string hash_hex(uint64_t h) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string ResultRecord::to_json() const {
    nlohmann::json j;
    j["config_hash"] = config_hash;
    j["module"] = module;
    j["operation"] = operation;
    j["inputs"] = inputs;
    j["outputs"] = outputs;
    if (!error.empty()) j["error"] = error;
    j["wall_ms"] = wall_ms;
    j["version"] = version;
    return j.dump();
}

void RecordSink::append(const ResultRecord& rec) const {
    std::ofstream out(path_, std::ios::app);
    if (!out) throw InvalidInput("record sink: cannot open " + path_);
    out << rec.to_json() << "\n";
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(path);
    if (!out) throw InvalidInput("csv: cannot open " + path);
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << "\n";
    for (const auto& row : rows) {
        if (row.size() != header.size()) throw InvalidInput("csv: row width mismatch");
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << "\n";
    }
}

}  // namespace fdl
