#pragma once

#include <nlohmann/json.hpp>

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "optrng/analysis.hpp"
#include "optrng/errors.hpp"
#include "optrng/extractors.hpp"
#include "optrng/nist/battery.hpp"
#include "optrng/physics.hpp"
#include "optrng/sources.hpp"

// JSON views of the library's result types. Every document carries a
// "schema" tag of the form optrng.<kind>/<version>.
namespace optrng::json {

using nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

inline std::string schema_tag(const std::string& kind) { return "optrng." + kind + "/" + std::to_string(kSchemaVersion); }

inline void require_schema(const ordered_json& j, const std::string& kind) {
    if (!j.is_object() || !j.contains("schema") || j["schema"] != schema_tag(kind)) {
        throw MalformedFile("expected a " + schema_tag(kind) + " document");
    }
}

inline ordered_json to_json(const nist::TestResult& r) {
    const auto& info = nist::info(r.id);
    ordered_json cats = ordered_json::array();
    for (auto c : nist::categories(r.id)) cats.push_back(std::string(nist::roman(c)));
    ordered_json params = ordered_json::object();
    for (const auto& [k, v] : r.params) params[k] = v;
    ordered_json j;
    j["id"] = static_cast<int>(r.id);
    j["name"] = std::string(info.name);
    j["categories"] = cats;
    j["params"] = params;
    j["p_values"] = r.p_values;
    j["applicable"] = r.applicable();
    j["status"] = std::string(nist::to_string(r.status));
    if (!r.reason.empty()) j["reason"] = r.reason;
    return j;
}

inline ordered_json to_json(const nist::TestReport& rep) {
    ordered_json j;
    j["schema"] = schema_tag("test_report");
    j["sequence_id"] = rep.sequence_id;
    j["length"] = rep.length;
    j["tests"] = ordered_json::array();
    for (const auto& t : rep.tests) j["tests"].push_back(to_json(t));
    return j;
}

inline nist::TestReport report_from_json(const ordered_json& j) {
    require_schema(j, "test_report");
    try {
        nist::TestReport rep;
        rep.sequence_id = j.at("sequence_id").get<std::string>();
        rep.length = j.at("length").get<std::size_t>();
        for (const auto& t : j.at("tests")) {
            nist::TestResult r;
            r.id = nist::test_from_number(t.at("id").get<int>());
            r.p_values = t.at("p_values").get<std::vector<double>>();
            for (double p : r.p_values) {
                if (!(p >= 0.0 && p <= 1.0)) throw MalformedFile("p-value outside [0, 1]");
            }
            const std::string status = t.value("status", t.at("applicable").get<bool>() ? "ok" : "too_short");
            r.status = status == "ok"             ? nist::TestStatus::ok
                       : status == "inapplicable" ? nist::TestStatus::inapplicable
                                                  : nist::TestStatus::too_short;
            r.reason = t.value("reason", "");
            for (const auto& [k, v] : t.at("params").items()) r.params.emplace_back(k, v.get<std::size_t>());
            rep.tests.push_back(std::move(r));
        }
        return rep;
    } catch (const nlohmann::json::exception& e) {
        throw MalformedFile(std::string("test report: ") + e.what());
    }
}

inline ordered_json to_json(const GenerationLog& log) {
    ordered_json j;
    j["schema"] = schema_tag("generation_log");
    j["emitted_bits"] = log.emitted_bits;
    j["empty_cycles"] = log.empty_cycles;
    j["coincidence_discards"] = log.coincidence_discards;
    j["elapsed_cycles"] = log.elapsed_cycles;
    return j;
}

inline ordered_json to_json(const ExtractionStats& s) {
    ordered_json j;
    j["schema"] = schema_tag("extraction_stats");
    j["input_bits"] = s.input_bits;
    j["output_bits"] = s.output_bits;
    j["discarded_bits"] = s.discarded_bits;
    j["yield"] = s.yield;
    return j;
}

inline ordered_json to_json(const FitResult& f) {
    ordered_json j;
    j["schema"] = schema_tag("hom_fit");
    j["C"] = f.params.c;
    j["A"] = f.params.a;
    j["w"] = f.params.w;
    j["residual_rms"] = f.residual_rms;
    j["iterations"] = f.iterations;
    j["converged"] = f.converged;
    j["lambda0"] = f.lambda0;
    j["delta_omega"] = f.spectrum.delta_omega;
    j["delta_lambda"] = f.spectrum.delta_lambda;
    return j;
}

/// NaN (a test that never applied) becomes null.
inline ordered_json number_or_null(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

inline ordered_json to_json(const MedianProfile& p, std::optional<double> mae_value) {
    ordered_json j;
    j["schema"] = schema_tag("median_profile");
    j["medians"] = ordered_json::array();
    for (const auto& e : p.entries) {
        ordered_json m;
        m["id"] = static_cast<int>(e.id);
        m["name"] = std::string(nist::info(e.id).name);
        m["median"] = e.median;
        m["sequences"] = e.sequences;
        j["medians"].push_back(m);
    }
    j["mae"] = mae_value ? ordered_json(*mae_value) : ordered_json(nullptr);
    return j;
}

inline ordered_json to_json(const HistogramSpec& h) {
    ordered_json j;
    j["schema"] = schema_tag("histogram");
    j["bin_count"] = h.bin_count;
    j["bin_width"] = h.bin_width();
    j["counts"] = h.counts;
    j["total"] = h.total;
    j["expected_per_bin"] = h.expected();
    j["chi_square"] = h.chi_square();
    j["degrees_of_freedom"] = h.degrees_of_freedom();
    return j;
}

inline ordered_json to_json(const PassRateTable& t) {
    ordered_json j;
    j["schema"] = schema_tag("pass_rates");
    j["subsequences"] = t.subsequences;
    j["sub_len"] = t.sub_len;
    j["alpha"] = t.alpha;
    j["rates"] = ordered_json::array();
    for (const auto& r : t.rates) {
        ordered_json row;
        row["id"] = static_cast<int>(r.id);
        row["name"] = std::string(nist::info(r.id).name);
        row["applicable_subsequences"] = r.applicable_subsequences;
        row["p_values"] = r.p_values;
        row["passed"] = r.passed;
        row["percent"] = number_or_null(r.percent());
        j["rates"].push_back(row);
    }
    return j;
}

}  // namespace optrng::json
