// optrng: generate, extract, mix, test and analyze optical RNG bitstreams.
//
// Exit codes: 0 success, 2 configuration error, 3 I/O or malformed input,
// 4 analysis not applicable (sequence too short, no applicable test, empty profile).
#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "optrng/analysis.hpp"
#include "optrng/bitstream_io.hpp"
#include "optrng/extractors.hpp"
#include "optrng/json.hpp"
#include "optrng/nist/battery.hpp"
#include "optrng/physics.hpp"
#include "optrng/sources.hpp"

namespace fs = std::filesystem;
using namespace optrng;

namespace {

enum Exit { kOk = 0, kConfig = 2, kIo = 3, kInapplicable = 4 };

// Stage sub-seeds: stream k of the global seed (see README).
enum Stream : std::uint64_t { kCoherentStream = 0, kHeraldedStream = 1, kInterleaveStream = 2, kSoftwareStream = 3 };

struct Globals {
    std::uint64_t seed = 1;
    std::string format = "packed";
    std::string in_format = "auto";
    unsigned jobs = 1;
    bool quiet = false;
};

void warn(const Globals& g, const std::string& msg) {
    if (!g.quiet) std::cerr << "warning: " << msg << '\n';
}

std::string read_input(const std::string& path) {
    if (path == "-") return read_all(std::cin);
    return read_file_bytes(path);
}

void write_output(const std::string& path, std::string_view data) {
    if (path == "-") {
        std::cout.write(data.data(), static_cast<std::streamsize>(data.size()));
        std::cout.flush();
        if (!std::cout) throw IoFailure("cannot write to stdout");
        return;
    }
    write_file_bytes(path, data);
}

BitSequence load_bits(const Globals& g, const std::string& path) {
    const auto data = read_input(path);
    if (g.in_format == "auto") {
        const bool packed = data.size() >= 4 && std::equal(kPackedMagic.begin(), kPackedMagic.end(), data.begin());
        return decode(data, packed ? BitFormat::packed : BitFormat::ascii01);
    }
    return decode(data, parse_bit_format(g.in_format));
}

void store_bits(const Globals& g, const std::string& path, const BitSequence& seq) {
    write_output(path, encode(seq, parse_bit_format(g.format)));
}

/**
 * Writes the effective configuration next to a file output; stdout outputs get
 * none. Only global keys and the active subcommand's keys are kept, and unset
 * optional values are dropped, so `optrng --config FILE <subcommand>` re-runs it.
 */
void write_config(CLI::App& app, const std::string& output, bool is_dir = false) {
    if (output.empty() || output == "-") return;
    std::string active;
    for (const auto* sub : app.get_subcommands()) active = sub->get_name();
    std::istringstream all(app.config_to_str(true, false));
    std::string kept;
    for (std::string line; std::getline(all, line);) {
        const auto eq = line.find('=');
        if (eq == std::string::npos || line.substr(eq + 1) == "\"\"") continue;
        const auto dot = line.find('.');
        if (dot != std::string::npos && dot < eq && line.compare(0, dot, active) != 0) continue;
        kept += line + '\n';
    }
    const fs::path path = is_dir ? fs::path(output) / "config.ini" : fs::path(output + ".config.ini");
    write_file_bytes(path, kept);
}

std::string sidecar(const std::string& output, const std::string& explicit_path, const std::string& suffix) {
    if (!explicit_path.empty()) return explicit_path;
    if (output == "-") return {};
    return output + suffix;
}

void emit_json(const std::string& path, const json::ordered_json& j) {
    const std::string text = j.dump(2) + "\n";
    if (path.empty()) {
        std::cerr << text;
    } else {
        write_output(path, text);
    }
}

// ---- generate ----

struct GenerateOpts {
    std::string source;
    std::size_t bits = 0;
    std::optional<std::uint64_t> cycles;
    double lambda = 0.1;
    double bias = 0.0;
    double period = 0.0;  // 0: bias held at its peak
    double offset = 0.0;
    double p = 0.5;
    double drift = 0.0;
    double drift_lo = 0.45;
    double drift_hi = 0.55;
    double omega = 20.0;
    std::string interleave = "stochastic";
    std::string output = "-";
    std::string log;
};

CoherentSourceConfig coherent_config(const GenerateOpts& o, const Globals& g) {
    CoherentSourceConfig c;
    c.mean_photons = o.lambda;
    c.bias_amplitude = o.bias;
    if (o.period > 0.0) c.bias_period = o.period;
    c.static_offset = o.offset;
    c.seed = derive_seed(g.seed, kCoherentStream);
    c.validate();
    return c;
}

HeraldedSourceConfig heralded_config(const GenerateOpts& o, const Globals& g) {
    HeraldedSourceConfig h;
    h.base_p = o.p;
    h.drift_step = o.drift;
    h.drift_lo = o.drift_lo;
    h.drift_hi = o.drift_hi;
    h.seed = derive_seed(g.seed, kHeraldedStream);
    h.validate();
    return h;
}

int run_generate(CLI::App& app, const GenerateOpts& o, const Globals& g) {
    BitSequence bits;
    std::optional<GenerationLog> log;
    if (o.source == "coherent") {
        const auto cfg = coherent_config(o, g);
        auto [seq, l] = o.cycles ? simulate_coherent(cfg, *o.cycles) : simulate_coherent_bits(cfg, o.bits);
        bits = std::move(seq);
        log = l;
    } else if (o.source == "heralded") {
        bits = simulate_heralded(heralded_config(o, g), o.bits);
    } else if (o.source == "hybrid") {
        HybridSourceConfig h;
        h.coherent = coherent_config(o, g);
        h.heralded = heralded_config(o, g);
        h.mean_spacing = o.omega;
        h.interleave = parse_interleave(o.interleave);
        h.seed = derive_seed(g.seed, kInterleaveStream);
        h.validate();
        auto [seq, l] = simulate_hybrid_logged(h, o.bits);
        bits = std::move(seq);
        log = l.coherent;
    } else {
        bits = software_source(o.bits, derive_seed(g.seed, kSoftwareStream));
    }
    if (bits.empty()) warn(g, "generated stream is empty");
    store_bits(g, o.output, bits);
    if (log) {
        const auto path = sidecar(o.output, o.log, ".log.json");
        emit_json(path, json::to_json(*log));
    }
    write_config(app, o.output);
    return kOk;
}

// ---- extract / mix ----

struct ExtractOpts {
    std::string method;
    std::string input;
    std::size_t n = kBabkinDefaultLength;
    std::string output = "-";
    std::string stats;
};

int run_extract(CLI::App& app, const ExtractOpts& o, const Globals& g) {
    const auto in = load_bits(g, o.input);
    auto [out, st] = o.method == "babkin" ? babkin_stream(in, o.n) : von_neumann(in);
    if (out.empty()) warn(g, "extracted stream is empty");
    store_bits(g, o.output, out);
    emit_json(sidecar(o.output, o.stats, ".stats.json"), json::to_json(st));
    write_config(app, o.output);
    return kOk;
}

struct MixOpts {
    std::string base;
    std::string quantum;
    std::size_t period = 0;
    std::string output = "-";
};

int run_mix(CLI::App& app, const MixOpts& o, const Globals& g) {
    const auto base = load_bits(g, o.base);
    const auto quantum = load_bits(g, o.quantum);
    store_bits(g, o.output, digital_mix(base, quantum, o.period));
    write_config(app, o.output);
    return kOk;
}

// ---- test / analyze ----

struct TestOpts {
    std::string input;
    std::string profile = "reduced";
    std::size_t split = 0;
    std::string output = "-";
};

int run_test_cmd(CLI::App& app, const TestOpts& o, const Globals& g) {
    const auto params = nist::TestParams::profile(o.profile);
    const auto seq = load_bits(g, o.input);
    const std::string stem = o.input == "-" ? "stdin" : fs::path(o.input).stem().string();

    std::vector<BitSequence> pieces;
    std::vector<std::string> ids;
    if (o.split > 0) {
        auto c = chunk(seq, o.split);
        if (c.chunks.empty()) throw TooShort("input shorter than one subsequence of " + std::to_string(o.split) + " bits");
        if (c.has_remainder()) warn(g, std::to_string(c.remainder.size()) + " trailing bits dropped");
        pieces = std::move(c.chunks);
        for (std::size_t i = 0; i < pieces.size(); ++i) ids.push_back(stem + "." + std::to_string(i));
    } else {
        pieces.push_back(seq);
        ids.push_back(stem);
    }

    std::vector<nist::TestReport> reports;
    if (pieces.size() == 1) {
        reports.push_back(nist::run_battery(pieces[0], params, ids[0], g.jobs));
    } else {
        reports = nist::run_batteries(pieces, params, ids, g.jobs);
    }

    std::size_t applicable = 0;
    for (const auto& r : reports) applicable += r.applicable_count();

    if (o.split > 0 && o.output != "-") {
        fs::create_directories(o.output);
        char name[64];
        for (std::size_t i = 0; i < reports.size(); ++i) {
            std::snprintf(name, sizeof name, "report_%05zu.json", i);
            write_output((fs::path(o.output) / name).string(), json::to_json(reports[i]).dump(2) + "\n");
        }
        write_config(app, o.output, true);
    } else if (reports.size() == 1) {
        write_output(o.output, json::to_json(reports[0]).dump(2) + "\n");
        write_config(app, o.output);
    } else {
        auto arr = json::ordered_json::array();
        for (const auto& r : reports) arr.push_back(json::to_json(r));
        write_output(o.output, arr.dump(2) + "\n");
    }

    if (applicable == 0) {
        std::cerr << "error: no test applies to the input; every test was flagged\n";
        return kInapplicable;
    }
    return kOk;
}

struct AnalyzeOpts {
    std::string reports;
    std::string output = ".";
    double alpha = kDefaultAlpha;
    std::size_t bins = 20;
};

std::vector<nist::TestReport> load_reports(const std::string& dir) {
    if (!fs::is_directory(dir)) throw IoFailure("not a directory: " + dir);
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<nist::TestReport> out;
    for (const auto& f : files) {
        json::ordered_json j;
        try {
            j = json::ordered_json::parse(read_file_bytes(f));
        } catch (const nlohmann::json::parse_error& e) {
            throw MalformedFile(f.string() + ": " + e.what());
        }
        if (j.is_object() && j.value("schema", "") == json::schema_tag("test_report")) out.push_back(json::report_from_json(j));
    }
    if (out.empty()) throw TooShort("no test reports found in " + dir);
    return out;
}

int run_analyze(CLI::App& app, const AnalyzeOpts& o, const Globals& /*g*/) {
    if (!(o.alpha > 0.0 && o.alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
    const auto reports = load_reports(o.reports);
    const auto profile = median_profile(reports);
    const double m = mae(profile);  // EmptyProfile when nothing applied
    const auto hist = aggregate_histogram(reports, o.bins);
    const auto rates = pass_rates(reports, o.alpha);

    fs::create_directories(o.output);
    const fs::path dir(o.output);
    write_file_bytes(dir / "median_profile.json", json::to_json(profile, m).dump(2) + "\n");
    write_file_bytes(dir / "median_profile.csv", median_profile_csv(profile));
    write_file_bytes(dir / "histogram.json", json::to_json(hist).dump(2) + "\n");
    write_file_bytes(dir / "histogram.csv", histogram_csv(hist));
    write_file_bytes(dir / "pass_rates.json", json::to_json(rates).dump(2) + "\n");
    write_file_bytes(dir / "pass_rates.csv", pass_rates_csv(rates));
    write_config(app, o.output, true);
    std::printf("reports %zu  tests in profile %zu  MAE %.6f\n", reports.size(), profile.entries.size(), m);
    return kOk;
}

// ---- fit-hom / thresholds ----

struct FitOpts {
    std::string input;
    double lambda0 = 810e-9;
    std::string output = "-";
    std::string curve;
    std::size_t samples = 201;
};

int run_fit(CLI::App& app, const FitOpts& o, const Globals& /*g*/) {
    const auto pts = parse_hom_csv(read_input(o.input));
    HomFitOptions opt;
    opt.lambda0 = o.lambda0;
    const auto fit = hom_fit(pts, opt);
    write_output(o.output, json::to_json(fit).dump(2) + "\n");
    if (!o.curve.empty()) {
        const auto [lo, hi] = std::minmax_element(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.l < b.l; });
        write_output(o.curve, hom_curve_csv(fit, lo->l, hi->l, o.samples));
    }
    write_config(app, o.output);
    return kOk;
}

struct ThresholdOpts {
    double alpha = kDefaultAlpha;
    std::vector<double> lengths{1e2, 1e3, 1e4, 1e5, 1e6, 1e7};
    std::string output = "-";
};

int run_thresholds(CLI::App& app, const ThresholdOpts& o, const Globals& /*g*/) {
    std::vector<ThresholdRow> rows;
    for (double n : o.lengths) rows.push_back(balance_threshold(n, o.alpha));
    write_output(o.output, thresholds_csv(rows, o.alpha));
    write_config(app, o.output);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optical random number generator simulator and test pipeline"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand
    app.set_config("--config", "", "INI configuration file; command-line flags override it");
    app.get_config_formatter_base()->quoteCharacter('"', '"');

    Globals g;
    app.add_option("--seed", g.seed, "Global seed; stage seeds derive from it")->capture_default_str();
    app.add_option("--format", g.format, "Output bit format")->check(CLI::IsMember({"packed", "ascii01"}))->capture_default_str();
    app.add_option("--in-format", g.in_format, "Input bit format")
        ->check(CLI::IsMember({"auto", "packed", "ascii01"}))
        ->capture_default_str();
    app.add_option("-j,--jobs", g.jobs, "Worker threads for test")->check(CLI::Range(1u, 256u))->capture_default_str();
    app.add_flag("-q,--quiet", g.quiet, "Suppress warnings");

    GenerateOpts gen;
    auto* generate = app.add_subcommand("generate", "Simulate a bit source");
    generate->add_option("source", gen.source, "coherent | heralded | hybrid | software")
        ->required()
        ->check(CLI::IsMember({"coherent", "heralded", "hybrid", "software"}));
    generate->add_option("--bits", gen.bits, "Number of output bits")->capture_default_str();
    generate->add_option("--cycles", gen.cycles, "Clock cycles to simulate (coherent only; overrides --bits)");
    generate->add_option("--lambda", gen.lambda, "Mean photons per cycle")->capture_default_str();
    generate->add_option("--bias", gen.bias, "Peak balance deviation a of the coherent source")->capture_default_str();
    generate->add_option("--period", gen.period, "Bias period in cycles (0 holds the bias at its peak)")->capture_default_str();
    generate->add_option("--offset", gen.offset, "Static detector imbalance")->capture_default_str();
    generate->add_option("--p", gen.p, "Heralded probability of a '1'")->capture_default_str();
    generate->add_option("--drift", gen.drift, "Heralded random-walk step")->capture_default_str();
    generate->add_option("--drift-lo", gen.drift_lo, "Lower drift bound")->capture_default_str();
    generate->add_option("--drift-hi", gen.drift_hi, "Upper drift bound")->capture_default_str();
    generate->add_option("--omega", gen.omega, "Hybrid: coherent bits per heralded bit")->capture_default_str();
    generate->add_option("--interleave", gen.interleave, "Hybrid interleave")
        ->check(CLI::IsMember({"stochastic", "periodic"}))
        ->capture_default_str();
    generate->add_option("-o,--output", gen.output, "Output file or - for stdout")->capture_default_str();
    generate->add_option("--log", gen.log, "Generation log JSON (default <output>.log.json)");

    ExtractOpts ext;
    auto* extract = app.add_subcommand("extract", "Run a randomness extractor");
    extract->add_option("method", ext.method, "vonneumann | babkin")->required()->check(CLI::IsMember({"vonneumann", "babkin"}));
    extract->add_option("input", ext.input, "Input bitstream or -")->required();
    extract->add_option("-n", ext.n, "Babkin subsequence length")->check(CLI::Range(std::size_t{2}, kBabkinMaxLength))->capture_default_str();
    extract->add_option("-o,--output", ext.output, "Output file or -")->capture_default_str();
    extract->add_option("--stats", ext.stats, "Extraction stats JSON (default <output>.stats.json, stderr for stdout)");

    MixOpts mx;
    auto* mix = app.add_subcommand("mix", "Replace every i-th bit of a base stream with quantum bits");
    mix->add_option("base", mx.base, "Base bitstream")->required();
    mix->add_option("quantum", mx.quantum, "Quantum bitstream")->required();
    mix->add_option("-i,--period", mx.period, "Mixing period i")->required()->check(CLI::PositiveNumber);
    mix->add_option("-o,--output", mx.output, "Output file or -")->capture_default_str();

    TestOpts tst;
    auto* test = app.add_subcommand("test", "Run the statistical test battery");
    test->add_option("input", tst.input, "Input bitstream or -")->required();
    test->add_option("--profile", tst.profile, "reduced (2 templates) | full (148 templates)")
        ->check(CLI::IsMember({"reduced", "full"}))
        ->capture_default_str();
    test->add_option("--split", tst.split, "Split into subsequences of this many bits (0: whole input)")->capture_default_str();
    test->add_option("-o,--output", tst.output, "Report JSON, or a directory with --split")->capture_default_str();

    AnalyzeOpts an;
    auto* analyze = app.add_subcommand("analyze", "Median profile, MAE, histogram and pass rates over reports");
    analyze->add_option("reports", an.reports, "Directory of test report JSON files")->required();
    analyze->add_option("-o,--output", an.output, "Output directory")->capture_default_str();
    analyze->add_option("--alpha", an.alpha, "Significance level")->capture_default_str();
    analyze->add_option("--bins", an.bins, "Histogram bins")->check(CLI::PositiveNumber)->capture_default_str();

    FitOpts fo;
    auto* fit = app.add_subcommand("fit-hom", "Fit a Hong-Ou-Mandel dip");
    fit->add_option("input", fo.input, "CSV of L,counts or -")->required();
    fit->add_option("--lambda0", fo.lambda0, "Central wavelength in metres")->capture_default_str();
    fit->add_option("-o,--output", fo.output, "Fit JSON or -")->capture_default_str();
    fit->add_option("--curve", fo.curve, "CSV of fitted curve samples");
    fit->add_option("--samples", fo.samples, "Curve samples")->check(CLI::PositiveNumber)->capture_default_str();

    ThresholdOpts th;
    auto* thresholds = app.add_subcommand("thresholds", "Balance and Stokes thresholds of the frequency test");
    thresholds->add_option("--alpha", th.alpha, "Significance level")->capture_default_str();
    thresholds->add_option("--lengths", th.lengths, "Sequence lengths")->capture_default_str();
    thresholds->add_option("-o,--output", th.output, "CSV file or -")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    }

    try {
        if (*generate) {
            if (!gen.cycles && generate->count("--bits") == 0) throw DomainError("--bits (or --cycles for coherent) is required");
            if (gen.source != "coherent" && gen.cycles) throw DomainError("--cycles applies to the coherent source only");
            return run_generate(app, gen, g);
        }
        if (*extract) return run_extract(app, ext, g);
        if (*mix) return run_mix(app, mx, g);
        if (*test) return run_test_cmd(app, tst, g);
        if (*analyze) return run_analyze(app, an, g);
        if (*fit) return run_fit(app, fo, g);
        if (*thresholds) return run_thresholds(app, th, g);
    } catch (const TooShort& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInapplicable;
    } catch (const Inapplicable& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInapplicable;
    } catch (const EmptyProfile& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInapplicable;
    } catch (const IoFailure& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIo;
    } catch (const MalformedFile& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIo;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIo;
    } catch (const Error& e) {
        // DomainError, LengthMismatch, InsufficientQuantumBits, fit failures, ...
        std::cerr << "error: " << e.what() << '\n';
        return kConfig;
    }
    return kOk;
}
