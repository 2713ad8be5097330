// credo: credible autocoding and verification of discrete-time linear
// controllers. Subcommands: autocode, check, lmi, simulate.
//
// Exit codes: 0 proven/holds, 1 refuted or not proven, 2 usage, 3 internal.

#include <CLI11.hpp>

#include "credo/pipeline.hpp"
#include "credo/stability.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

constexpr int kExitProven = 0;
constexpr int kExitRefuted = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInternal = 3;

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("file not found: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

int cmd_autocode(const std::string& spec_path, std::string out_path, std::string report_path) {
    credo::ControllerSpec spec = credo::load_spec(spec_path);
    credo::AutocodeResult result = credo::autocode(spec);

    if (out_path.empty())
        out_path = std::filesystem::path(spec_path).stem().string() + ".c";
    if (report_path.empty())
        report_path = std::filesystem::path(spec_path).stem().string() + ".report.json";
    write_file(out_path, result.emission.text);
    write_file(report_path, credo::generation_report_json(result));

    bool proven = result.containment.proven_psd();
    std::cout << "autocode: " << out_path << " written, containment "
              << credo::to_string(result.containment.status);
    if (result.containment.margin)
        std::cout << " (margin " << credo::to_display_decimal(*result.containment.margin) << ")";
    std::cout << "\n";
    return proven ? kExitProven : kExitRefuted;
}

int cmd_check(const std::string& c_path, std::string report_path, double epsilon,
              bool fail_on_unknown) {
    credo::ParsedArtifact artifact = credo::parse_annotated_c(read_file(c_path));
    credo::CheckOptions options;
    options.epsilon = epsilon;
    credo::VerificationReport report = credo::check_artifact(artifact, options);
    if (fail_on_unknown) {
        // Strict mode: containment-only proofs do not count.
        for (auto& t : report.triples)
            if (t.by_containment) {
                t.verdict = credo::TripleVerdict::Unknown;
                t.detail += " (strict mode: exact equality required)";
                if (report.overall == credo::TripleVerdict::Proven)
                    report.overall = credo::TripleVerdict::Unknown;
            }
    }
    if (report_path.empty())
        report_path = std::filesystem::path(c_path).stem().string() + ".verification.json";
    write_file(report_path, credo::report_to_json(report));

    int proven = 0;
    for (const auto& t : report.triples)
        if (t.verdict == credo::TripleVerdict::Proven) ++proven;
    std::cout << "check: " << proven << "/" << report.triples.size() << " triples proven, "
              << "final containment "
              << (report.final_containment_checked
                      ? credo::to_string(report.final_containment.status)
                      : "Unknown")
              << ", overall " << credo::to_string(report.overall) << "\n";
    return report.overall == credo::TripleVerdict::Proven ? kExitProven : kExitRefuted;
}

int cmd_lmi(const std::string& spec_path) {
    credo::ControllerSpec spec = credo::load_spec(spec_path);
    credo::StraightLineProgram program = credo::lower(spec);
    credo::StabilityCertificate cert = credo::certificate_from_observers(spec, program);
    credo::LmiResult result = credo::check_lmi(spec, cert);
    std::cout << "lmi: alpha " << credo::to_display_decimal(cert.alpha) << ", block "
              << result.lmi_block.shape_string() << ", verdict "
              << credo::to_string(result.verdict.status);
    if (result.verdict.margin)
        std::cout << " (margin " << credo::to_display_decimal(*result.verdict.margin) << ")";
    std::cout << "\n";
    return result.verdict.proven_psd() ? kExitProven : kExitRefuted;
}

int cmd_simulate(const std::string& spec_path, long steps, std::uint64_t seed,
                 const std::string& mode, const std::string& constants,
                 std::string trace_path) {
    credo::ControllerSpec spec = credo::load_spec(spec_path);
    credo::SimOptions options;
    bool has_level = false;
    if (mode == "zero") {
        options.mode = credo::InputMode::Zero;
    } else if (mode == "constant") {
        options.mode = credo::InputMode::Constant;
        std::stringstream ss(constants);
        std::string cell;
        while (std::getline(ss, cell, ','))
            options.constant.push_back(credo::to_double(credo::parse_decimal(cell)));
    } else if (mode == "uniform-in-bound") {
        options = credo::sim_options_from_observers(spec, credo::lower(spec));
    } else {
        throw std::runtime_error("unknown input mode \"" + mode + "\"");
    }
    if (!options.level_p) {
        // Level column needs the inductive observer; fall back to zero levels.
        try {
            credo::SimOptions with_level =
                credo::sim_options_from_observers(spec, credo::lower(spec));
            options.level_p = with_level.level_p;
        } catch (const std::exception&) {
        }
    }
    has_level = options.level_p.has_value();

    credo::SimTrace trace = credo::simulate(spec, steps, seed, options);

    if (trace_path.empty())
        trace_path = std::filesystem::path(spec_path).stem().string() + ".trace.csv";
    std::ostringstream csv;
    csv << "step";
    for (const auto& s : spec.state_names) csv << "," << s;
    for (const auto& s : spec.input_names) csv << "," << s;
    for (const auto& s : spec.output_names) csv << "," << s;
    csv << ",level\n";
    for (std::size_t k = 0; k < trace.rows.size(); ++k) {
        const auto& row = trace.rows[k];
        csv << k;
        char buf[64];
        auto emit = [&](double v) {
            auto res = std::to_chars(buf, buf + sizeof buf, v);
            csv << "," << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf));
        };
        for (double v : row.state) emit(v);
        for (double v : row.input) emit(v);
        for (double v : row.output) emit(v);
        emit(row.level);
        csv << "\n";
    }
    write_file(trace_path, csv.str());
    std::cout << "simulate: " << trace.rows.size() - 1 << " steps, seed " << seed
              << ", max level " << trace.max_level << ", trace " << trace_path << "\n";
    if (has_level && trace.max_level > 1.0) return kExitRefuted;
    return kExitProven;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"credible autocoding for discrete-time linear controllers"};
    app.require_subcommand(1);

    std::string spec_path, c_path, out_path, report_path, trace_path;
    std::string mode = "uniform-in-bound", constants;
    double epsilon = 9.313225746154785e-10;  // 2^-30
    std::uint64_t seed = 0;
    long steps = 1000;
    bool fail_on_unknown = false;

    CLI::App* autocode = app.add_subcommand(
        "autocode", "generate annotated C and a generation report from a controller spec");
    autocode->add_option("spec", spec_path, "controller spec (JSON)")->required();
    autocode->add_option("-o,--output", out_path, "annotated C output path");
    autocode->add_option("--report", report_path, "generation report path (JSON)");

    CLI::App* check = app.add_subcommand(
        "check", "independently verify an annotated C file and write a report");
    check->add_option("file", c_path, "annotated C file")->required();
    check->add_option("--report", report_path, "verification report path (JSON)");
    check->add_option("--epsilon", epsilon, "interval Cholesky shift for float checks");
    check->add_flag("--fail-on-unknown", fail_on_unknown,
                    "treat containment-only proofs as Unknown");

    CLI::App* lmi = app.add_subcommand("lmi", "check the invariance LMI for the declared observers");
    lmi->add_option("spec", spec_path, "controller spec (JSON)")->required();

    CLI::App* simulate = app.add_subcommand("simulate", "simulate the controller and write a CSV trace");
    simulate->add_option("spec", spec_path, "controller spec (JSON)")->required();
    simulate->add_option("--steps", steps, "number of steps");
    simulate->add_option("--seed", seed, "RNG seed");
    simulate->add_option("--mode", mode, "zero | constant | uniform-in-bound");
    simulate->add_option("--input-const", constants, "comma-separated raw input values");
    simulate->add_option("-o,--output", trace_path, "trace CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (app.got_subcommand(autocode)) return cmd_autocode(spec_path, out_path, report_path);
        if (app.got_subcommand(check))
            return cmd_check(c_path, report_path, epsilon, fail_on_unknown);
        if (app.got_subcommand(lmi)) return cmd_lmi(spec_path);
        if (app.got_subcommand(simulate))
            return cmd_simulate(spec_path, steps, seed, mode, constants, trace_path);
    } catch (const credo::SpecError& e) {
        std::cerr << "credo: spec error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const credo::AnnotationParseError& e) {
        std::cerr << "credo: parse error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "credo: error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitUsage;
}
