/*
 * Copyright 2026 The pqsense Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "pqs/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "pqs/error.hpp"
#include "pqs/experiment.hpp"
#include "pqs/optics.hpp"
#include "pqs/plasmonic.hpp"
#include "pqs/scenario.hpp"
#include "pqs/units.hpp"
#include "pqs/verification.hpp"

namespace pqs::cli {

using Json = nlohmann::ordered_json;

std::string format_number(double x) {
    if (x == 0.0) {
        return "0";
    }
    char buf[512];
    const double a = std::abs(x);
    const auto fmt = a >= 1e-5 && a < 1e16 ? std::chars_format::fixed : std::chars_format::scientific;
    const auto r = std::to_chars(buf, buf + sizeof buf, x, fmt);
    return {buf, r.ptr};
}

std::string format_fixed(double x, int decimals) {
    char buf[128];
    const auto r = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::fixed, decimals);
    std::string s(buf, r.ptr);
    if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') {
        s.erase(0, 1); // no "-0.000"
    }
    return s;
}

namespace {

struct Options {
    std::string scenario_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> samples;
    std::optional<std::string> out_dir;
    std::optional<unsigned> workers;
    bool dump_config{false};
    std::string pair{"all"};
};

struct Context {
    Scenario scenario;
    std::uint64_t seed;
    unsigned workers;
    std::filesystem::path out_dir;
    std::ostream &out;
};

void write_file(const std::filesystem::path &path, const std::string &text) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) {
        throw IoError("cannot create directory '" + path.parent_path().string() + "': " + ec.message());
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    f << text;
    f.close();
    if (!f) {
        throw IoError("cannot write '" + path.string() + "'");
    }
}

std::string quadrant_name(QuadrantIndex q) { return "q" + std::to_string(q + 1); }

Json threshold_json(const Threshold &t) {
    return {{"voltage_mv", t.voltage}, {"extrapolated", t.extrapolated}};
}

Json report_json(const PairResult &p) {
    Json j;
    j["pair"] = pair_label(p.report.probe, p.report.conj);
    j["correlated"] = p.curve.correlated();
    j["v_tb"] = threshold_json(p.report.v_tb);
    j["v_cs"] = threshold_json(p.report.v_cs);
    j["v_opt"] = threshold_json(p.report.v_opt);
    j["enhancement_pct"] = p.report.enhancement_pct;
    j["regime_ok"] = p.curve.regime_ok;
    j["gain"] = p.curve.noise.gain;
    j["noise"] = {{"twin_beam", p.curve.noise.twin_beam},
                  {"coherent", p.curve.noise.coherent},
                  {"optimal_classical", p.curve.noise.optimal_classical}};
    if (p.sampled) {
        j["sampled"] = {{"v_tb", threshold_json(*p.sampled_v_tb)},
                        {"v_cs", threshold_json(*p.sampled_v_cs)},
                        {"clamped_points", p.sampled->clamped_points}};
    }
    return j;
}

std::string sweep_csv(const std::vector<PairResult> &pairs) {
    std::string csv = "voltage_mV,pair,snr_tb,snr_cs,snr_opt\n";
    for (const PairResult &p : pairs) {
        const std::string label = pair_label(p.curve.probe, p.curve.conj);
        for (const SweepPoint &pt : p.curve.points) {
            csv += format_number(pt.drive_mv) + "," + label + "," + format_number(pt.snr_tb) + "," +
                   format_number(pt.snr_cs) + "," + format_number(pt.snr_opt) + "\n";
        }
    }
    return csv;
}

int cmd_budget(Context &c) {
    const BudgetResult b = run_budget(c.scenario);
    std::string csv = "stage,gain,gain_db,squeezing_db,detected_db\n";
    c.out << "stage          g        g [dB]   squeezing [dB]  detected [dB]\n";
    for (const BudgetRow &r : b.rows) {
        csv += r.stage + "," + format_number(r.gain) + "," + format_fixed(r.gain_db, 3) + "," +
               format_fixed(r.squeezing_db, 3) + "," + format_fixed(r.detected_db, 3) + "\n";
        std::string name = r.stage;
        name.resize(std::max<std::size_t>(name.size(), 14), ' ');
        c.out << name << " " << format_fixed(r.gain, 4) << "   " << format_fixed(r.gain_db, 3)
              << "    " << format_fixed(r.squeezing_db, 3) << "          "
              << format_fixed(r.detected_db, 3) << "\n";
    }
    write_file(c.out_dir / "budget.csv", csv);

    Json j;
    j["scenario"] = c.scenario.name;
    if (b.calibration) {
        const CalibrationResult &cal = *b.calibration;
        j["source"] = {{"gain", cal.params.gain},
                       {"seed_flux", cal.source.seed_flux},
                       {"excess_correlated", cal.params.excess_correlated},
                       {"excess_uncorrelated", cal.params.excess_uncorrelated}};
        j["optics_transmission"] = cal.params.optics_transmission;
        j["straddle_fraction"] = cal.params.straddle_fraction;
        if (b.calibrated_cell_size_um) {
            j["cell_size_um"] = *b.calibrated_cell_size_um;
        }
        j["fitted"] = {{"optics", cal.fitted_optics},
                       {"cut", cal.fitted_cut},
                       {"excess", cal.fitted_excess}};
        j["gain_bound_active"] = cal.gain_bound_active;
        j["max_abs_residual_db"] = cal.max_abs_residual_db;
        Json res = Json::array();
        for (const StageResidual &r : cal.residuals) {
            Json e{{"stage", stage_name(r.stage)},
                   {"target_db", r.target_db},
                   {"model_db", r.model_db}};
            if (r.target_gain_db) {
                e["target_gain_db"] = *r.target_gain_db;
                e["model_gain_db"] = *r.model_gain_db;
            }
            res.push_back(e);
        }
        j["residuals"] = res;
        c.out << "calibrated G = " << format_number(cal.params.gain)
              << (cal.gain_bound_active ? " (at bound)" : "") << ", max residual "
              << format_fixed(cal.max_abs_residual_db, 3) << " dB\n";
    }
    write_file(c.out_dir / "calibration.json", j.dump(2) + "\n");
    return kOk;
}

int cmd_optimize_beam(Context &c) {
    const GeometryConfig &g = c.scenario.geometry;
    const QuadrantLayout layout = g.layout();
    const std::vector<WaistPoint> curve =
        waist_curve(layout, g.waist_scan_min_um, g.waist_scan_max_um, g.waist_scan_points);
    const WaistOptimum best = optimize_waist(layout, g.waist_scan_min_um, g.waist_scan_max_um);
    std::string csv = "diameter_um,total\n";
    for (const WaistPoint &p : curve) {
        csv += format_number(p.diameter) + "," + format_number(p.total) + "\n";
    }
    write_file(c.out_dir / "waist_curve.csv", csv);
    const QuadrantTransmission t =
        quadrant_transmission(GaussianBeam::from_diameter(best.diameter), layout);
    Json j{{"diameter_um", best.diameter},
           {"total", best.total},
           {"fractions", t.fractions},
           {"gap", t.gap},
           {"tail", t.tail},
           {"unimodal", is_unimodal(curve)}};
    write_file(c.out_dir / "beam_optimum.json", j.dump(2) + "\n");
    c.out << "optimal diameter " << format_fixed(best.diameter, 3) << " um, total transmission "
          << format_fixed(best.total, 4) << "\n";
    return kOk;
}

int cmd_resonance_scan(Context &c) {
    const std::vector<ResonancePoint> scan = resonance_scan(c.scenario.sensors, 700.0, 900.0, 401);
    std::string csv = "lambda_nm,t_q1,t_q2,t_q3,t_q4\n";
    for (const ResonancePoint &p : scan) {
        csv += format_number(p.lambda_nm);
        for (double t : p.transmission) {
            csv += "," + format_number(t);
        }
        csv += "\n";
    }
    write_file(c.out_dir / "resonance.csv", csv);
    const double l = c.scenario.analysis.operating_wavelength_nm;
    for (QuadrantIndex q = 0; q < kQuadrants; ++q) {
        c.out << quadrant_name(q) << ": T(" << format_number(l)
              << " nm) = " << format_fixed(transmission_at(c.scenario.sensors[q], l), 4) << "\n";
    }
    return kOk;
}

std::vector<std::pair<QuadrantIndex, QuadrantIndex>> parse_pairs(const std::string &spec) {
    if (spec == "all") {
        return all_quadrant_pairs();
    }
    if (spec == "correlated") {
        return {{0, 0}, {1, 1}, {2, 2}, {3, 3}};
    }
    if (spec.size() == 4 && spec[0] == 'p' && spec[2] == 'c' && spec[1] >= '1' && spec[1] <= '4' &&
        spec[3] >= '1' && spec[3] <= '4') {
        return {{static_cast<QuadrantIndex>(spec[1] - '1'), static_cast<QuadrantIndex>(spec[3] - '1')}};
    }
    throw ValidationError("--pair: expected all, correlated or pXcY with X, Y in 1..4");
}

int cmd_snr_sweep(Context &c, const Options &o) {
    const auto pairs = parse_pairs(o.pair);
    const QuadrantModel model = build_quadrant_model(c.scenario);
    std::vector<PairResult> results;
    for (const auto &[i, j] : pairs) {
        PairResult pr;
        pr.curve = snr_sweep(model.readouts[i], model.readouts[j], c.scenario.sweep.voltages_mv,
                             c.scenario.analysis.regime_gate);
        pr.report = enhancement_report(pr.curve);
        results.push_back(std::move(pr));
    }
    write_file(c.out_dir / "snr_sweep.csv", sweep_csv(results));
    Json reports = Json::array();
    for (const PairResult &p : results) {
        reports.push_back(report_json(p));
    }
    write_file(c.out_dir / "enhancement.json", reports.dump(2) + "\n");
    for (const PairResult &p : results) {
        c.out << pair_label(p.report.probe, p.report.conj) << ": V_TB "
              << format_fixed(p.report.v_tb.voltage, 1) << " mV, V_CS "
              << format_fixed(p.report.v_cs.voltage, 1) << " mV, enhancement "
              << format_fixed(p.report.enhancement_pct, 2) << " %\n";
    }
    return kOk;
}

int cmd_fig4(Context &c, std::size_t samples) {
    const Fig4Result r = run_fig4(c.scenario, samples, c.seed, c.workers);
    write_file(c.out_dir / "fig4.csv", sweep_csv(r.pairs));
    Json j;
    j["scenario"] = c.scenario.name;
    j["seed"] = c.seed;
    j["samples"] = samples;
    j["volts_to_index"] = r.model.volts_to_index;
    j["quadrant_squeezing_db"] = r.model.squeezing_db;
    Json reports = Json::array();
    for (const PairResult &p : r.pairs) {
        reports.push_back(report_json(p));
    }
    j["pairs"] = reports;
    write_file(c.out_dir / "fig4.json", j.dump(2) + "\n");
    for (const PairResult &p : r.pairs) {
        if (!p.curve.correlated()) {
            continue;
        }
        c.out << pair_label(p.report.probe, p.report.conj) << ": V_TB "
              << format_fixed(p.report.v_tb.voltage, 1) << " mV, V_CS "
              << format_fixed(p.report.v_cs.voltage, 1) << " mV, enhancement "
              << format_fixed(p.report.enhancement_pct, 2) << " %";
        if (p.sampled_v_tb) {
            c.out << ", sampled V_TB " << format_fixed(p.sampled_v_tb->voltage, 1) << " mV";
        }
        c.out << "\n";
    }
    return kOk;
}

int cmd_fig3(Context &c) {
    const Fig3Result r = run_fig3(c.scenario, c.seed);
    const auto &d = c.scenario.fig3.drives_mv;
    std::string csv = "quadrant,frequency_hz,snl_db,squeezed_db,driven_" + format_number(d[0]) +
                      "mV_db,driven_" + format_number(d[1]) + "mV_db\n";
    for (const Fig3Row &row : r.rows) {
        csv += quadrant_name(row.quadrant) + "," + format_number(row.frequency_hz) + "," +
               format_fixed(row.snl_db, 3) + "," + format_fixed(row.squeezed_db, 3) + "," +
               format_fixed(row.driven_db[0], 3) + "," + format_fixed(row.driven_db[1], 3) + "\n";
    }
    write_file(c.out_dir / "fig3.csv", csv);
    Json j;
    j["scenario"] = c.scenario.name;
    j["seed"] = c.seed;
    j["drives_mv"] = d;
    j["quadrant_squeezing_db"] = r.model.squeezing_db;
    j["drive_ratio_db"] = r.drive_ratio_db;
    write_file(c.out_dir / "fig3.json", j.dump(2) + "\n");
    for (QuadrantIndex q = 0; q < kQuadrants; ++q) {
        c.out << quadrant_name(q) << ": squeezed floor " << format_fixed(r.model.squeezing_db[q], 3)
              << " dB, S(" << format_number(d[0]) << ")/S(" << format_number(d[1]) << ") "
              << format_fixed(r.drive_ratio_db[q], 3) << " dB\n";
    }
    return kOk;
}

int cmd_verify(Context &c, std::optional<std::size_t> samples) {
    VerifyOptions vo;
    vo.seed = c.seed;
    vo.workers = c.workers;
    vo.oracle_samples = samples.value_or(c.scenario.montecarlo.oracle_samples);
    vo.grid_samples = c.scenario.montecarlo.samples;
    const std::vector<CheckResult> checks = run_oracle_suite(c.scenario, vo);
    bool all = true;
    Json arr = Json::array();
    for (const CheckResult &r : checks) {
        all = all && r.passed;
        arr.push_back({{"name", r.name},
                       {"passed", r.passed},
                       {"statistic", r.statistic},
                       {"tolerance", r.tolerance},
                       {"detail", r.detail}});
        c.out << (r.passed ? "PASS " : "FAIL ") << r.name << " (" << format_number(r.statistic)
              << " vs " << format_number(r.tolerance) << ")\n";
    }
    Json j{{"scenario", c.scenario.name},
           {"seed", c.seed},
           {"oracle_samples", vo.oracle_samples},
           {"grid_samples", vo.grid_samples},
           {"passed", all},
           {"checks", arr}};
    write_file(c.out_dir / "verify.json", j.dump(2) + "\n");
    return all ? kOk : kNumeric;
}

} // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"Twin-beam quadrant plasmonic sensing simulator", "pqsense"};
    Options o;
    app.add_option("--scenario", o.scenario_path, "Scenario file (JSON with comments)");
    app.add_option("--seed", o.seed, "Master seed (overrides the scenario)");
    app.add_option("--samples", o.samples, "Monte Carlo draws");
    app.add_option("--out", o.out_dir, "Output directory (overrides the scenario)");
    app.add_option("--workers", o.workers, "Sampling threads; results do not depend on it")
        ->check(CLI::Range(1u, 1024u));
    app.add_flag("--dump-config", o.dump_config, "Print the resolved scenario and exit");
    app.fallthrough();
    app.require_subcommand(0, 1);

    CLI::App *budget = app.add_subcommand("squeezing-budget", "Stage-by-stage squeezing table");
    CLI::App *beam = app.add_subcommand("optimize-beam", "Waist optimization for the quadrant layout");
    CLI::App *res = app.add_subcommand("resonance-scan", "EOT transmission spectra");
    CLI::App *sweep = app.add_subcommand("snr-sweep", "SNR against drive voltage");
    sweep->add_option("--pair", o.pair, "all, correlated, or pXcY");
    CLI::App *verify = app.add_subcommand("verify", "Run the oracle suite");
    CLI::App *fig3 = app.add_subcommand("fig3", "Noise-power spectra around the drive frequency");
    CLI::App *fig4 = app.add_subcommand("fig4", "16-pair SNR sweep and enhancement report");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp &e) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError &e) {
        err << "pqsense: " << e.what() << "\n" << "run with --help for usage\n";
        return kValidation;
    }

    try {
        if (o.scenario_path.empty()) {
            throw ValidationError("--scenario is required");
        }
        Scenario s = load_scenario(o.scenario_path);
        if (o.dump_config) {
            out << dump_scenario(s);
            return kOk;
        }
        if (app.get_subcommands().empty()) {
            err << "pqsense: no subcommand given\n" << app.help();
            return kValidation;
        }
        if (o.samples && *o.samples < 2) {
            throw ValidationError("--samples must be >= 2");
        }
        Context c{s, o.seed.value_or(s.seed), o.workers.value_or(s.montecarlo.workers),
                  o.out_dir.value_or(s.output_dir), out};

        if (budget->parsed()) {
            return cmd_budget(c);
        }
        if (beam->parsed()) {
            return cmd_optimize_beam(c);
        }
        if (res->parsed()) {
            return cmd_resonance_scan(c);
        }
        if (sweep->parsed()) {
            return cmd_snr_sweep(c, o);
        }
        if (verify->parsed()) {
            return cmd_verify(c, o.samples);
        }
        if (fig3->parsed()) {
            return cmd_fig3(c);
        }
        if (fig4->parsed()) {
            return cmd_fig4(c, o.samples.value_or(s.montecarlo.samples));
        }
    } catch (const ValidationError &e) {
        err << "pqsense: validation error: " << e.what() << "\n";
        return kValidation;
    } catch (const IoError &e) {
        err << "pqsense: i/o error: " << e.what() << "\n";
        return kIo;
    } catch (const Error &e) {
        err << "pqsense: numeric error: " << e.what() << "\n";
        return kNumeric;
    }
    return kValidation;
}

} // namespace pqs::cli
