#pragma once

// Output files: trace CSVs, terminal-state JSON, run manifests.
// Every file is written once, through a temporary sibling and a rename.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "json.hpp"

#include "hocl/error.hpp"
#include "hocl/model.hpp"
#include "hocl/scenarios.hpp"

namespace hocl {

inline constexpr std::string_view kTraceHeader = "t,r,gate,mean_abs_dtheta,mean_abs_dw,frob_w,v_theta,v_w,v_total";
inline constexpr std::string_view kTrainHeader = "iter,loss,r,gate,v_total,frob_w,density";
inline constexpr const char* kVersion = "1.0.0";

// 17 significant digits: parses back to the same double.
inline std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void ensure_directory(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) {
        throw IoError("cannot create output directory '" + dir.string() + "'");
    }
}

inline void write_atomic(const std::filesystem::path& path, std::string_view content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw IoError("write failed for '" + tmp.string() + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot move output into place at '" + path.string() + "'");
    }
}

inline void append_trace_rows(std::string& out, const std::vector<TraceRow>& rows) {
    for (const TraceRow& r : rows) {
        out += std::to_string(r.t);
        for (double v : {r.r, r.gate, r.mean_abs_dtheta, r.mean_abs_dw, r.frob_w, r.v_theta, r.v_w, r.v_total}) {
            out += ',';
            out += format_real(v);
        }
        out += '\n';
    }
}

inline std::string trace_csv(const std::vector<TraceRow>& rows) {
    std::string out(kTraceHeader);
    out += '\n';
    append_trace_rows(out, rows);
    return out;
}

inline std::string train_csv(const std::vector<StepMetrics>& trace) {
    std::string out(kTrainHeader);
    out += '\n';
    for (const StepMetrics& m : trace) {
        out += std::to_string(m.iteration);
        for (double v : {m.loss, m.r, m.gate, m.v_total, m.frob_w, m.density}) {
            out += ',';
            out += format_real(v);
        }
        out += '\n';
    }
    return out;
}

inline nlohmann::ordered_json weights_json(const WeightMatrix& w) {
    nlohmann::ordered_json j;
    j["n"] = w.size();
    j["row_major"] = std::vector<double>(w.data().begin(), w.data().end());
    return j;
}

// Cluster labels are reported 1-based, matching the unit numbering in the figures.
inline nlohmann::ordered_json clusters_json(const std::vector<std::vector<std::size_t>>& clusters) {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& c : clusters) {
        nlohmann::ordered_json members = nlohmann::ordered_json::array();
        for (std::size_t i : c) members.push_back(i + 1);
        j.push_back(members);
    }
    return j;
}

inline std::string dump(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

inline nlohmann::ordered_json final_state_json(const SimulationTrace& trace) {
    nlohmann::ordered_json j;
    j["phases"] = trace.final_phases;
    j["frequencies"] = trace.frequencies;
    j["weights"] = weights_json(trace.final_weights);
    j["clusters"] = clusters_json(trace.clusters);
    return j;
}

}  // namespace hocl
