#include "crossdiff/manifest.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "crossdiff/errors.hpp"
#include "crossdiff/version.hpp"

namespace crossdiff {

namespace {

double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

}  // namespace

std::uint64_t fnv1a64_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SolverError("cannot hash '" + path + "'");
    std::uint64_t hash = 1469598103934665603ull;
    char buf[1 << 14];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            hash ^= static_cast<unsigned char>(buf[i]);
            hash *= 1099511628211ull;
        }
        if (!in) break;
    }
    return hash;
}

ManifestWriter::ManifestWriter(std::string command, std::string out_dir)
    : command_(std::move(command)), out_dir_(std::move(out_dir)), start_time_(now_seconds()) {}

void ManifestWriter::set_config_echo(const std::vector<std::string>& lines) { echo_ = lines; }

void ManifestWriter::set_tolerance(const std::string& name, double value) {
    tolerances_[name] = value;
}

void ManifestWriter::set_stat(const std::string& name, double value) { stats_[name] = value; }

void ManifestWriter::set_note(const std::string& name, const std::string& value) {
    notes_[name] = value;
}

void ManifestWriter::add_output(const std::string& filename) { outputs_.push_back(filename); }

void ManifestWriter::write() {
    nlohmann::ordered_json j;
    j["command"] = command_;
    j["code_version"] = kVersion;
    j["config"] = echo_;
    {
        std::uint64_t h = 1469598103934665603ull;
        for (const std::string& line : echo_) {
            for (unsigned char ch : line) {
                h ^= ch;
                h *= 1099511628211ull;
            }
            h ^= '\n';
            h *= 1099511628211ull;
        }
        char hex[20];
        std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
        j["config_hash"] = hex;
    }
    j["tolerances"] = tolerances_;
    j["stats"] = stats_;
    if (!notes_.empty()) j["notes"] = notes_;
    j["elapsed_seconds"] = now_seconds() - start_time_;

    nlohmann::ordered_json files = nlohmann::ordered_json::array();
    std::uint64_t combined = 1469598103934665603ull;
    for (const std::string& name : outputs_) {
        const std::string path = out_dir_ + "/" + name;
        const std::uint64_t h = fnv1a64_file(path);
        char hex[20];
        std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
        files.push_back({{"file", name},
                         {"bytes", std::filesystem::file_size(path)},
                         {"fnv1a64", hex}});
        combined ^= h;
        combined *= 1099511628211ull;
    }
    j["outputs"] = files;
    char hex[20];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(combined));
    j["content_hash"] = hex;

    const std::string tmp = out_dir_ + "/manifest.json.tmp";
    const std::string final_path = out_dir_ + "/manifest.json";
    {
        std::ofstream out(tmp);
        if (!out) throw SolverError("cannot write '" + tmp + "'");
        out << j.dump(2) << '\n';
    }
    std::filesystem::rename(tmp, final_path);
}

}  // namespace crossdiff
