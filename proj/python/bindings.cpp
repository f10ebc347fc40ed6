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

#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "pqs/analysis.hpp"
#include "pqs/calibration.hpp"
#include "pqs/cli.hpp"
#include "pqs/detection.hpp"
#include "pqs/error.hpp"
#include "pqs/experiment.hpp"
#include "pqs/montecarlo.hpp"
#include "pqs/optics.hpp"
#include "pqs/plasmonic.hpp"
#include "pqs/quantum_source.hpp"
#include "pqs/scenario.hpp"

namespace py = pybind11;
using namespace pqs;

namespace {

py::array_t<double> to_array(std::vector<double> &&v) {
    auto *heap = new std::vector<double>(std::move(v));
    py::capsule owner(heap, [](void *p) { delete static_cast<std::vector<double> *>(p); });
    return py::array_t<double>({static_cast<py::ssize_t>(heap->size())},
                               {static_cast<py::ssize_t>(sizeof(double))}, heap->data(), owner);
}

py::dict fig4_summary(const Scenario &s, std::size_t samples, std::uint64_t seed, unsigned workers) {
    const Fig4Result r = run_fig4(s, samples, seed, workers);
    py::dict out;
    for (const PairResult &p : r.pairs) {
        py::dict d;
        d["v_tb"] = p.report.v_tb.voltage;
        d["v_cs"] = p.report.v_cs.voltage;
        d["v_opt"] = p.report.v_opt.voltage;
        d["enhancement_pct"] = p.report.enhancement_pct;
        d["correlated"] = p.curve.correlated();
        if (p.sampled_v_tb) {
            d["sampled_v_tb"] = p.sampled_v_tb->voltage;
            d["sampled_v_cs"] = p.sampled_v_cs->voltage;
        }
        out[py::str(pair_label(p.curve.probe, p.curve.conj))] = d;
    }
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Twin-beam quadrant plasmonic sensing model";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
    py::register_exception<NumericError>(m, "NumericError", base.ptr());
    py::register_exception<FitError>(m, "FitError", base.ptr());
    py::register_exception<SearchError>(m, "SearchError", base.ptr());
    py::register_exception<IoError>(m, "IoError", base.ptr());

    py::class_<TwinBeamMoments>(m, "TwinBeamMoments")
        .def(py::init<>())
        .def(py::init([](double mp, double mc, double vp, double vc, double cov) {
                 return TwinBeamMoments{mp, mc, vp, vc, cov};
             }),
             py::arg("mean_p"), py::arg("mean_c"), py::arg("var_p"), py::arg("var_c"), py::arg("cov"))
        .def_readwrite("mean_p", &TwinBeamMoments::mean_p)
        .def_readwrite("mean_c", &TwinBeamMoments::mean_c)
        .def_readwrite("var_p", &TwinBeamMoments::var_p)
        .def_readwrite("var_c", &TwinBeamMoments::var_c)
        .def_readwrite("cov", &TwinBeamMoments::cov)
        .def("validate", &TwinBeamMoments::validate)
        .def("is_valid", &TwinBeamMoments::is_valid)
        .def_static("coherent", &TwinBeamMoments::coherent, py::arg("mean_p"), py::arg("mean_c"))
        .def(py::self == py::self)
        .def("__repr__", [](const TwinBeamMoments &t) {
            std::ostringstream os;
            os << t;
            return os.str();
        });

    py::class_<FwmSourceParams>(m, "FwmSourceParams")
        .def(py::init([](double g, double n, double zc, double zu) {
                 return FwmSourceParams{g, n, zc, zu, {}};
             }),
             py::arg("gain") = 1.0, py::arg("seed_flux") = 1.0, py::arg("excess_correlated") = 0.0,
             py::arg("excess_uncorrelated") = 0.0)
        .def_readwrite("gain", &FwmSourceParams::gain)
        .def_readwrite("seed_flux", &FwmSourceParams::seed_flux)
        .def_readwrite("excess_correlated", &FwmSourceParams::excess_correlated)
        .def_readwrite("excess_uncorrelated", &FwmSourceParams::excess_uncorrelated)
        .def_readwrite("metadata", &FwmSourceParams::metadata);

    py::class_<LossChannel>(m, "LossChannel")
        .def(py::init([](double p, double c) { return LossChannel{p, c}; }), py::arg("eta_p") = 1.0,
             py::arg("eta_c") = 1.0)
        .def_readwrite("eta_p", &LossChannel::eta_p)
        .def_readwrite("eta_c", &LossChannel::eta_c)
        .def("then", &LossChannel::then);

    py::class_<NoiseReport>(m, "NoiseReport")
        .def_readonly("diff_variance", &NoiseReport::diff_variance)
        .def_readonly("snl", &NoiseReport::snl)
        .def_readonly("ratio_linear", &NoiseReport::ratio_linear)
        .def_readonly("ratio_db", &NoiseReport::ratio_db)
        .def_readonly("gain", &NoiseReport::gain);

    m.def("fwm_moments", &fwm_moments, py::arg("params"));
    m.def("source_squeezing_db", [](const TwinBeamMoments &t) { return source_squeezing(t).db; });
    m.def("apply_loss", &apply_loss, py::arg("moments"), py::arg("channel"));
    m.def("difference_noise", &difference_noise, py::arg("moments"), py::arg("channel"), py::arg("g"));
    m.def("optimal_gain", &optimal_gain, py::arg("moments"), py::arg("channel"));
    m.def("min_difference_noise", &min_difference_noise, py::arg("moments"), py::arg("channel"));
    m.def("covariance_from_noise", &covariance_from_noise, py::arg("var_p"), py::arg("var_c"),
          py::arg("var_diff"));
    m.def("snl_noise", &snl_noise, py::arg("mean_p"), py::arg("mean_c"), py::arg("channel"), py::arg("g"));
    m.def("squeezing_report", &squeezing_report, py::arg("moments"), py::arg("channel"),
          py::arg("gain") = py::none());

    // Geometry and optics.
    py::class_<QuadrantLayout>(m, "QuadrantLayout")
        .def(py::init([](double w, double gap, double tilt) { return QuadrantLayout{w, gap, tilt}; }),
             py::arg("window_size") = 200.0, py::arg("gap") = 20.0, py::arg("tilt_deg") = 0.0)
        .def_readwrite("window_size", &QuadrantLayout::window_size)
        .def_readwrite("gap", &QuadrantLayout::gap)
        .def_readwrite("tilt_deg", &QuadrantLayout::tilt_deg)
        .def_readwrite("window_transmissions", &QuadrantLayout::window_transmissions)
        .def_static("razor_cut", &QuadrantLayout::razor_cut);

    m.def(
        "quadrant_transmission",
        [](double diameter, const QuadrantLayout &layout, double cx, double cy) {
            const auto t = quadrant_transmission(GaussianBeam::from_diameter(diameter, {cx, cy}), layout);
            py::dict d;
            d["fractions"] = t.fractions;
            d["total"] = t.total;
            d["gap"] = t.gap;
            d["tail"] = t.tail;
            return d;
        },
        py::arg("diameter_um"), py::arg("layout"), py::arg("cx") = 0.0, py::arg("cy") = 0.0);
    m.def(
        "optimize_waist",
        [](const QuadrantLayout &layout, double lo, double hi) {
            const auto o = optimize_waist(layout, lo, hi);
            return py::make_tuple(o.diameter, o.total);
        },
        py::arg("layout"), py::arg("d_min") = 100.0, py::arg("d_max") = 1000.0);

    // Plasmonic sensors.
    py::class_<EOTResonance>(m, "EOTResonance")
        .def(py::init([](double l0, double w, double t, double s) { return EOTResonance{l0, w, t, s}; }),
             py::arg("lambda0"), py::arg("linewidth"), py::arg("t_max"), py::arg("dlambda_dn") = 300.0)
        .def_readwrite("lambda0", &EOTResonance::lambda0)
        .def_readwrite("linewidth", &EOTResonance::linewidth)
        .def_readwrite("t_max", &EOTResonance::t_max)
        .def_readwrite("dlambda_dn", &EOTResonance::dlambda_dn);
    m.def("transmission_at", &transmission_at, py::arg("resonance"), py::arg("lambda_nm"));
    m.def("transduction_slope", &transduction_slope, py::arg("resonance"), py::arg("lambda_nm"));

    // Analysis.
    m.def("snr", [](double s, double off) { return snr(s, off).value; }, py::arg("signal"), py::arg("s_off"));
    m.def("enhancement", &enhancement, py::arg("v_cs"), py::arg("v_tb"));

    // Calibration.
    m.def(
        "calibrate_source",
        [](const std::vector<std::tuple<std::string, double, std::optional<double>>> &targets) {
            std::vector<StageTarget> t;
            for (const auto &[stage, db, gain] : targets) {
                t.push_back({parse_stage(stage), db, gain});
            }
            const auto r = calibrate_source(t);
            py::dict d;
            d["gain"] = r.params.gain;
            d["excess_correlated"] = r.params.excess_correlated;
            d["excess_uncorrelated"] = r.params.excess_uncorrelated;
            d["optics_transmission"] = r.params.optics_transmission;
            d["straddle_fraction"] = r.params.straddle_fraction;
            d["max_abs_residual_db"] = r.max_abs_residual_db;
            d["gain_bound_active"] = r.gain_bound_active;
            return d;
        },
        py::arg("targets"), "Targets are (stage, squeezing_db, gain_db or None) tuples.");

    // Sampling.
    m.def(
        "sample_pair",
        [](const TwinBeamMoments &t, std::size_t n, std::uint64_t seed, unsigned workers) {
            PairSamples s;
            {
                py::gil_scoped_release release;
                s = sample_pair(t, n, seed, 0, workers);
            }
            return py::make_tuple(to_array(std::move(s.probe)), to_array(std::move(s.conj)));
        },
        py::arg("moments"), py::arg("n"), py::arg("seed"), py::arg("workers") = 1);

    // Scenarios and experiments.
    py::class_<Scenario>(m, "Scenario")
        .def_readwrite("name", &Scenario::name)
        .def_readwrite("seed", &Scenario::seed)
        .def_readwrite("source", &Scenario::source)
        .def_readwrite("sensors", &Scenario::sensors)
        .def("dump", [](const Scenario &s) { return dump_scenario(s); })
        .def(py::self == py::self);
    m.def("load_scenario", &load_scenario, py::arg("path"));
    m.def("parse_scenario", &parse_scenario, py::arg("text"));
    m.def(
        "run_fig4",
        [](const Scenario &s, std::optional<std::size_t> samples, std::optional<std::uint64_t> seed,
           unsigned workers) {
            return fig4_summary(s, samples.value_or(s.montecarlo.samples), seed.value_or(s.seed), workers);
        },
        py::arg("scenario"), py::arg("samples") = py::none(), py::arg("seed") = py::none(),
        py::arg("workers") = 1);

    m.def(
        "run_cli",
        [](const std::vector<std::string> &args) {
            std::ostringstream out;
            std::ostringstream err;
            const int code = cli::run(args, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs a pqsense command; returns (exit_code, stdout, stderr).");
}
