// Result records: every emitted number carries the config hash that
// produced it.  Records append to a JSON-lines file; curves go to CSV.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "fdl/common.hpp"

namespace fdl {

struct ResultRecord {
    std::string config_hash;
    std::string module;
    std::string operation;
    std::map<std::string, std::string> inputs;
    std::map<std::string, std::string> outputs;
    std::string error;  // empty on success
    double wall_ms = 0.0;
    std::string version = kVersion;

    std::string to_json() const;
};

// Append-only JSON-lines sink.
class RecordSink {
public:
    explicit RecordSink(std::string path) : path_(std::move(path)) {}
    void append(const ResultRecord& rec) const;

private:
    std::string path_;
};

// One header row, fixed column order.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

std::string format_full(double v);  // shortest round-trip decimal
std::string hash_hex(uint64_t h);

}  // namespace fdl
