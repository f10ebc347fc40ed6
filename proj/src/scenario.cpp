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

#include "pqs/scenario.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"

#include "pqs/error.hpp"

namespace pqs {

using Json = nlohmann::ordered_json;

QuadrantLayout GeometryConfig::layout() const {
    QuadrantLayout l;
    l.window_size = window_size_um;
    l.gap = gap_um;
    l.tilt_deg = tilt_deg;
    return l;
}

ChainSettings Scenario::chain_settings() const {
    ChainSettings c;
    c.seed_flux = source.seed_flux;
    c.quantum_efficiency = losses.quantum_efficiency;
    c.cut_fraction = calibration.cut_fraction;
    c.sensor = {losses.sensor_probe, losses.sensor_conjugate};
    c.gain_max = calibration.gain_max;
    c.gain_convention = calibration.gain_convention;
    c.infeasible_residual_db = calibration.infeasible_residual_db;
    return c;
}

namespace {

[[noreturn]] void fail(const std::string &path, const std::string &msg) {
    throw ValidationError(path + ": " + msg);
}

void check(bool cond, const std::string &path, const std::string &msg) {
    if (!cond) {
        fail(path, msg);
    }
}

bool finite(double x) { return std::isfinite(x); }

void check_fraction(double x, const std::string &path) {
    check(finite(x) && x >= 0.0 && x <= 1.0, path, "must lie in [0, 1]");
}

void check_positive(double x, const std::string &path) {
    check(finite(x) && x > 0.0, path, "must be > 0");
}

// Object reader that records which keys were consumed so unknown keys can
// be rejected; a typo must not silently fall back to a default.
class Obj {
  public:
    Obj(const Json &j, std::string path) : j_(j), path_(std::move(path)) {
        check(j.is_object(), path_.empty() ? "<root>" : path_, "expected an object");
    }

    [[nodiscard]] std::string at(const std::string &key) const {
        return path_.empty() ? key : path_ + "." + key;
    }

    [[nodiscard]] bool has(const std::string &key) const { return j_.contains(key); }

    const Json &raw(const std::string &key) {
        seen_.insert(key);
        return j_.at(key);
    }

    void number(const std::string &key, double &out) {
        if (!has(key)) {
            return;
        }
        const Json &v = raw(key);
        check(v.is_number(), at(key), "expected a number");
        out = v.get<double>();
    }

    template <class Int> void integer(const std::string &key, Int &out) {
        if (!has(key)) {
            return;
        }
        const Json &v = raw(key);
        check(v.is_number_integer() && (v.is_number_unsigned() || v.get<std::int64_t>() >= 0),
              at(key), "expected a non-negative integer");
        const auto u = v.get<std::uint64_t>();
        check(u <= static_cast<std::uint64_t>(std::numeric_limits<Int>::max()), at(key),
              "integer out of range");
        out = static_cast<Int>(u);
    }

    void string(const std::string &key, std::string &out) {
        if (!has(key)) {
            return;
        }
        const Json &v = raw(key);
        check(v.is_string(), at(key), "expected a string");
        out = v.get<std::string>();
    }

    template <std::size_t N> void numbers(const std::string &key, std::array<double, N> &out) {
        if (!has(key)) {
            return;
        }
        const Json &v = raw(key);
        check(v.is_array() && v.size() == N, at(key),
              "expected an array of " + std::to_string(N) + " numbers");
        for (std::size_t i = 0; i < N; ++i) {
            check(v[i].is_number(), at(key) + "[" + std::to_string(i) + "]", "expected a number");
            out[i] = v[i].get<double>();
        }
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!seen_.count(it.key())) {
                fail(at(it.key()), "unknown key");
            }
        }
    }

  private:
    const Json &j_;
    std::string path_;
    std::set<std::string> seen_;
};

void read_source(Obj o, FwmSourceParams &s) {
    o.number("gain", s.gain);
    o.number("seed_flux", s.seed_flux);
    o.number("excess_correlated", s.excess_correlated);
    o.number("excess_uncorrelated", s.excess_uncorrelated);
    if (o.has("metadata")) {
        const Json &m = o.raw("metadata");
        check(m.is_object(), o.at("metadata"), "expected an object");
        s.metadata.clear();
        for (auto it = m.begin(); it != m.end(); ++it) {
            const std::string p = o.at("metadata") + "." + it.key();
            check(it->is_string() || it->is_number(), p, "expected a string or number");
            s.metadata[it.key()] = it->is_string() ? it->get<std::string>() : it->dump();
        }
    }
    o.finish();
}

void read_calibration(Obj o, CalibrationConfig &c) {
    if (o.has("targets")) {
        const Json &t = o.raw("targets");
        check(t.is_array(), o.at("targets"), "expected an array");
        c.targets.clear();
        for (std::size_t i = 0; i < t.size(); ++i) {
            Obj e(t[i], o.at("targets") + "[" + std::to_string(i) + "]");
            StageTarget st;
            std::string label;
            e.string("stage", label);
            check(!label.empty(), e.at("stage"), "required");
            try {
                st.stage = parse_stage(label);
            } catch (const ValidationError &) {
                fail(e.at("stage"), "unknown stage '" + label + "'");
            }
            check(e.has("squeezing_db"), e.at("squeezing_db"), "required");
            e.number("squeezing_db", st.squeezing_db);
            if (e.has("gain_db")) {
                double g = 0.0;
                e.number("gain_db", g);
                st.gain_db = g;
            }
            e.finish();
            c.targets.push_back(st);
        }
    }
    o.number("cut_fraction", c.cut_fraction);
    o.number("gain_max", c.gain_max);
    if (o.has("gain_convention")) {
        std::string conv;
        o.string("gain_convention", conv);
        if (conv == "amplitude") {
            c.gain_convention = GainConvention::amplitude;
        } else if (conv == "power") {
            c.gain_convention = GainConvention::power;
        } else {
            fail(o.at("gain_convention"), "expected \"amplitude\" or \"power\"");
        }
    }
    o.number("infeasible_residual_db", c.infeasible_residual_db);
    o.finish();
}

void read_losses(Obj o, LossTable &l) {
    o.number("optics_transmission", l.optics_transmission);
    o.number("quantum_efficiency", l.quantum_efficiency);
    o.number("sensor_probe", l.sensor_probe);
    o.number("sensor_conjugate", l.sensor_conjugate);
    o.number("mask_transmission", l.mask_transmission);
    o.finish();
}

void read_geometry(Obj o, GeometryConfig &g) {
    o.number("probe_waist_um", g.probe_waist_um);
    o.number("conjugate_waist_um", g.conjugate_waist_um);
    o.number("window_size_um", g.window_size_um);
    o.number("gap_um", g.gap_um);
    o.number("tilt_deg", g.tilt_deg);
    o.number("grid_extent_um", g.grid_extent_um);
    o.number("waist_scan_min_um", g.waist_scan_min_um);
    o.number("waist_scan_max_um", g.waist_scan_max_um);
    o.integer("waist_scan_points", g.waist_scan_points);
    o.finish();
}

void read_sensor(Obj o, EOTResonance &r) {
    o.number("lambda0_nm", r.lambda0);
    o.number("linewidth_nm", r.linewidth);
    o.number("t_max", r.t_max);
    o.number("dlambda_dn", r.dlambda_dn);
    o.finish();
}

void read_sweep(Obj o, SweepConfig &s) {
    const bool list = o.has("voltages_mv");
    const bool range = o.has("start_mv") || o.has("stop_mv") || o.has("step_mv");
    check(!(list && range), o.at("voltages_mv"), "give either a list or a range, not both");
    if (list) {
        const Json &v = o.raw("voltages_mv");
        check(v.is_array(), o.at("voltages_mv"), "expected an array");
        s.voltages_mv.clear();
        for (std::size_t i = 0; i < v.size(); ++i) {
            check(v[i].is_number(), o.at("voltages_mv") + "[" + std::to_string(i) + "]",
                  "expected a number");
            s.voltages_mv.push_back(v[i].get<double>());
        }
    } else if (range) {
        double start = 0.0;
        double stop = 0.0;
        double step = 0.0;
        for (const char *k : {"start_mv", "stop_mv", "step_mv"}) {
            check(o.has(k), o.at(k), "required with a range sweep");
        }
        o.number("start_mv", start);
        o.number("stop_mv", stop);
        o.number("step_mv", step);
        check(finite(step) && step > 0.0, o.at("step_mv"), "must be > 0");
        check(finite(start) && finite(stop) && stop >= start, o.at("stop_mv"),
              "must be >= start_mv");
        const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
        check(n <= 1'000'000, o.at("step_mv"), "range has too many points");
        s.voltages_mv.clear();
        for (std::size_t i = 0; i < n; ++i) {
            s.voltages_mv.push_back(start + step * static_cast<double>(i));
        }
    }
    o.finish();
}

void read_analysis(Obj o, AnalysisConfig &a) {
    if (o.has("gain")) {
        const Json &g = o.raw("gain");
        if (g.is_string()) {
            check(g.get<std::string>() == "optimal", o.at("gain"),
                  "expected \"optimal\" or a number");
            a.fixed_gain.reset();
        } else {
            check(g.is_number(), o.at("gain"), "expected \"optimal\" or a number");
            a.fixed_gain = g.get<double>();
        }
    }
    o.number("regime_gate", a.regime_gate);
    o.number("rbw_scale", a.rbw_scale);
    o.number("operating_wavelength_nm", a.operating_wavelength_nm);
    for (const char *k : {"quadrant_squeezing_db", "target_thresholds_mv"}) {
        if (!o.has(k)) {
            continue;
        }
        auto &slot = std::string(k) == "quadrant_squeezing_db" ? a.quadrant_squeezing_db
                                                               : a.target_thresholds_mv;
        if (o.raw(k).is_null()) {
            slot.reset();
            continue;
        }
        std::array<double, kQuadrants> v{};
        o.numbers(k, v);
        slot = v;
    }
    o.finish();
}

void read_fig3(Obj o, Fig3Config &f) {
    o.numbers("drives_mv", f.drives_mv);
    o.number("span_hz", f.span_hz);
    o.integer("bins", f.bins);
    o.number("rbw_hz", f.rbw_hz);
    o.integer("averages", f.averages);
    o.finish();
}

void read_montecarlo(Obj o, MonteCarloConfig &m) {
    o.integer("samples", m.samples);
    o.integer("oracle_samples", m.oracle_samples);
    o.integer("workers", m.workers);
    o.finish();
}

} // namespace

void Scenario::validate() const {
    check(!name.empty(), "name", "must not be empty");

    check(finite(source.gain) && source.gain >= 1.0, "source.gain", "must be >= 1");
    check_positive(source.seed_flux, "source.seed_flux");
    check(finite(source.excess_correlated) && source.excess_correlated >= 0.0,
          "source.excess_correlated", "must be >= 0");
    check(finite(source.excess_uncorrelated) && source.excess_uncorrelated >= 0.0,
          "source.excess_uncorrelated", "must be >= 0");

    for (std::size_t i = 0; i < calibration.targets.size(); ++i) {
        const StageTarget &t = calibration.targets[i];
        const std::string p = "calibration.targets[" + std::to_string(i) + "]";
        check(finite(t.squeezing_db), p + ".squeezing_db", "must be finite");
        check(!t.gain_db || finite(*t.gain_db), p + ".gain_db", "must be finite");
    }
    check(finite(calibration.cut_fraction) && calibration.cut_fraction > 0.0 &&
              calibration.cut_fraction <= 1.0,
          "calibration.cut_fraction", "must lie in (0, 1]");
    check(finite(calibration.gain_max) && calibration.gain_max > 1.0, "calibration.gain_max",
          "must be > 1");
    check_positive(calibration.infeasible_residual_db, "calibration.infeasible_residual_db");

    check_fraction(losses.optics_transmission, "losses.optics_transmission");
    check(finite(losses.quantum_efficiency) && losses.quantum_efficiency > 0.0 &&
              losses.quantum_efficiency <= 1.0,
          "losses.quantum_efficiency", "must lie in (0, 1]");
    check_fraction(losses.sensor_probe, "losses.sensor_probe");
    check_fraction(losses.sensor_conjugate, "losses.sensor_conjugate");
    check_fraction(losses.mask_transmission, "losses.mask_transmission");

    check_positive(geometry.probe_waist_um, "geometry.probe_waist_um");
    check_positive(geometry.conjugate_waist_um, "geometry.conjugate_waist_um");
    check_positive(geometry.window_size_um, "geometry.window_size_um");
    check(finite(geometry.gap_um) && geometry.gap_um >= 0.0, "geometry.gap_um", "must be >= 0");
    check(finite(geometry.tilt_deg) && geometry.tilt_deg >= 0.0 && geometry.tilt_deg < 90.0,
          "geometry.tilt_deg", "must lie in [0, 90)");
    check(finite(geometry.grid_extent_um) &&
              geometry.grid_extent_um >=
                  4.0 * std::max(geometry.probe_waist_um, geometry.conjugate_waist_um),
          "geometry.grid_extent_um", "must cover at least four beam diameters");
    check_positive(geometry.waist_scan_min_um, "geometry.waist_scan_min_um");
    check(finite(geometry.waist_scan_max_um) &&
              geometry.waist_scan_max_um > geometry.waist_scan_min_um,
          "geometry.waist_scan_max_um", "must exceed waist_scan_min_um");
    check(geometry.waist_scan_points >= 3, "geometry.waist_scan_points", "must be >= 3");

    check(finite(cell_size_um) && cell_size_um > 0.0 && cell_size_um <= geometry.grid_extent_um,
          "coherence.cell_size_um", "must lie in (0, grid_extent_um]");

    for (std::size_t q = 0; q < kQuadrants; ++q) {
        const std::string p = "sensors[" + std::to_string(q) + "]";
        check(finite(sensors[q].lambda0), p + ".lambda0_nm", "must be finite");
        check_positive(sensors[q].linewidth, p + ".linewidth_nm");
        check_fraction(sensors[q].t_max, p + ".t_max");
        check(finite(sensors[q].dlambda_dn), p + ".dlambda_dn", "must be finite");
    }

    check_positive(modulation.frequency_hz, "modulation.frequency_hz");
    for (std::size_t q = 0; q < kQuadrants; ++q) {
        check(finite(modulation.volts_to_index[q]) && modulation.volts_to_index[q] >= 0.0,
              "modulation.volts_to_index[" + std::to_string(q) + "]", "must be >= 0");
    }

    check(!sweep.voltages_mv.empty(), "sweep.voltages_mv", "must not be empty");
    for (std::size_t i = 0; i < sweep.voltages_mv.size(); ++i) {
        const std::string p = "sweep.voltages_mv[" + std::to_string(i) + "]";
        check(finite(sweep.voltages_mv[i]) && sweep.voltages_mv[i] >= 0.0, p, "must be >= 0");
        check(i == 0 || sweep.voltages_mv[i] > sweep.voltages_mv[i - 1], p,
              "voltages must be strictly increasing");
    }

    check(!analysis.fixed_gain || (finite(*analysis.fixed_gain) && *analysis.fixed_gain >= 0.0),
          "analysis.gain", "must be >= 0");
    check_positive(analysis.regime_gate, "analysis.regime_gate");
    check_positive(analysis.rbw_scale, "analysis.rbw_scale");
    check(finite(analysis.operating_wavelength_nm), "analysis.operating_wavelength_nm",
          "must be finite");
    if (analysis.quadrant_squeezing_db) {
        for (std::size_t q = 0; q < kQuadrants; ++q) {
            check(finite((*analysis.quadrant_squeezing_db)[q]),
                  "analysis.quadrant_squeezing_db[" + std::to_string(q) + "]", "must be finite");
        }
    }
    if (analysis.target_thresholds_mv) {
        for (std::size_t q = 0; q < kQuadrants; ++q) {
            check_positive((*analysis.target_thresholds_mv)[q],
                           "analysis.target_thresholds_mv[" + std::to_string(q) + "]");
        }
    }

    for (std::size_t i = 0; i < 2; ++i) {
        check(finite(fig3.drives_mv[i]) && fig3.drives_mv[i] >= 0.0,
              "fig3.drives_mv[" + std::to_string(i) + "]", "must be >= 0");
    }
    check_positive(fig3.span_hz, "fig3.span_hz");
    check(fig3.bins >= 3 && fig3.bins % 2 == 1, "fig3.bins", "must be odd and >= 3");
    check_positive(fig3.rbw_hz, "fig3.rbw_hz");
    check(fig3.averages >= 1, "fig3.averages", "must be >= 1");

    check(montecarlo.samples >= 2, "montecarlo.samples", "must be >= 2");
    check(montecarlo.oracle_samples >= 2, "montecarlo.oracle_samples", "must be >= 2");
    check(montecarlo.workers >= 1 && montecarlo.workers <= 1024, "montecarlo.workers",
          "must lie in [1, 1024]");

    check(!output_dir.empty(), "output.dir", "must not be empty");
}

Scenario parse_scenario(const std::string &text) {
    Json j;
    try {
        j = Json::parse(text, nullptr, true, true);
    } catch (const Json::parse_error &e) {
        throw ValidationError(std::string("<root>: malformed scenario: ") + e.what());
    }
    Scenario s;
    Obj root(j, "");
    root.string("name", s.name);
    root.integer("seed", s.seed);
    if (root.has("source")) {
        read_source(Obj(root.raw("source"), "source"), s.source);
    }
    if (root.has("calibration")) {
        read_calibration(Obj(root.raw("calibration"), "calibration"), s.calibration);
    }
    if (root.has("losses")) {
        read_losses(Obj(root.raw("losses"), "losses"), s.losses);
    }
    if (root.has("geometry")) {
        read_geometry(Obj(root.raw("geometry"), "geometry"), s.geometry);
    }
    if (root.has("coherence")) {
        Obj c(root.raw("coherence"), "coherence");
        c.number("cell_size_um", s.cell_size_um);
        c.finish();
    }
    if (root.has("sensors")) {
        const Json &arr = root.raw("sensors");
        check(arr.is_array() && arr.size() == kQuadrants, "sensors",
              "expected an array of four resonances");
        for (std::size_t q = 0; q < kQuadrants; ++q) {
            read_sensor(Obj(arr[q], "sensors[" + std::to_string(q) + "]"), s.sensors[q]);
        }
    }
    if (root.has("modulation")) {
        Obj m(root.raw("modulation"), "modulation");
        m.number("frequency_hz", s.modulation.frequency_hz);
        m.numbers("volts_to_index", s.modulation.volts_to_index);
        m.finish();
    }
    if (root.has("sweep")) {
        read_sweep(Obj(root.raw("sweep"), "sweep"), s.sweep);
    }
    if (root.has("analysis")) {
        read_analysis(Obj(root.raw("analysis"), "analysis"), s.analysis);
    }
    if (root.has("fig3")) {
        read_fig3(Obj(root.raw("fig3"), "fig3"), s.fig3);
    }
    if (root.has("montecarlo")) {
        read_montecarlo(Obj(root.raw("montecarlo"), "montecarlo"), s.montecarlo);
    }
    if (root.has("output")) {
        Obj o(root.raw("output"), "output");
        o.string("dir", s.output_dir);
        o.finish();
    }
    root.finish();
    s.validate();
    return s;
}

Scenario load_scenario(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read scenario file '" + path.string() + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

std::string dump_scenario(const Scenario &s) {
    Json j;
    j["name"] = s.name;
    j["seed"] = s.seed;

    Json src;
    src["gain"] = s.source.gain;
    src["seed_flux"] = s.source.seed_flux;
    src["excess_correlated"] = s.source.excess_correlated;
    src["excess_uncorrelated"] = s.source.excess_uncorrelated;
    src["metadata"] = Json::object();
    for (const auto &[k, v] : s.source.metadata) {
        src["metadata"][k] = v;
    }
    j["source"] = src;

    Json cal;
    cal["targets"] = Json::array();
    for (const StageTarget &t : s.calibration.targets) {
        Json e;
        e["stage"] = stage_name(t.stage);
        e["squeezing_db"] = t.squeezing_db;
        if (t.gain_db) {
            e["gain_db"] = *t.gain_db;
        }
        cal["targets"].push_back(e);
    }
    cal["cut_fraction"] = s.calibration.cut_fraction;
    cal["gain_max"] = s.calibration.gain_max;
    cal["gain_convention"] =
        s.calibration.gain_convention == GainConvention::amplitude ? "amplitude" : "power";
    cal["infeasible_residual_db"] = s.calibration.infeasible_residual_db;
    j["calibration"] = cal;

    j["losses"] = {{"optics_transmission", s.losses.optics_transmission},
                   {"quantum_efficiency", s.losses.quantum_efficiency},
                   {"sensor_probe", s.losses.sensor_probe},
                   {"sensor_conjugate", s.losses.sensor_conjugate},
                   {"mask_transmission", s.losses.mask_transmission}};

    const GeometryConfig &g = s.geometry;
    j["geometry"] = {{"probe_waist_um", g.probe_waist_um},
                     {"conjugate_waist_um", g.conjugate_waist_um},
                     {"window_size_um", g.window_size_um},
                     {"gap_um", g.gap_um},
                     {"tilt_deg", g.tilt_deg},
                     {"grid_extent_um", g.grid_extent_um},
                     {"waist_scan_min_um", g.waist_scan_min_um},
                     {"waist_scan_max_um", g.waist_scan_max_um},
                     {"waist_scan_points", g.waist_scan_points}};

    j["coherence"] = {{"cell_size_um", s.cell_size_um}};

    j["sensors"] = Json::array();
    for (const EOTResonance &r : s.sensors) {
        j["sensors"].push_back({{"lambda0_nm", r.lambda0},
                                {"linewidth_nm", r.linewidth},
                                {"t_max", r.t_max},
                                {"dlambda_dn", r.dlambda_dn}});
    }

    j["modulation"] = {{"frequency_hz", s.modulation.frequency_hz},
                       {"volts_to_index", s.modulation.volts_to_index}};
    j["sweep"] = {{"voltages_mv", s.sweep.voltages_mv}};

    Json an;
    if (s.analysis.fixed_gain) {
        an["gain"] = *s.analysis.fixed_gain;
    } else {
        an["gain"] = "optimal";
    }
    an["regime_gate"] = s.analysis.regime_gate;
    an["rbw_scale"] = s.analysis.rbw_scale;
    an["operating_wavelength_nm"] = s.analysis.operating_wavelength_nm;
    an["quadrant_squeezing_db"] =
        s.analysis.quadrant_squeezing_db ? Json(*s.analysis.quadrant_squeezing_db) : Json(nullptr);
    an["target_thresholds_mv"] =
        s.analysis.target_thresholds_mv ? Json(*s.analysis.target_thresholds_mv) : Json(nullptr);
    j["analysis"] = an;

    j["fig3"] = {{"drives_mv", s.fig3.drives_mv},
                 {"span_hz", s.fig3.span_hz},
                 {"bins", s.fig3.bins},
                 {"rbw_hz", s.fig3.rbw_hz},
                 {"averages", s.fig3.averages}};
    j["montecarlo"] = {{"samples", s.montecarlo.samples},
                       {"oracle_samples", s.montecarlo.oracle_samples},
                       {"workers", s.montecarlo.workers}};
    j["output"] = {{"dir", s.output_dir}};
    return j.dump(2) + "\n";
}

bool operator==(const Scenario &a, const Scenario &b) { return dump_scenario(a) == dump_scenario(b); }

} // namespace pqs
