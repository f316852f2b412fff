#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "specphen/bispectrum.hpp"
#include "specphen/breakpoint.hpp"
#include "specphen/cluster.hpp"
#include "specphen/inference.hpp"
#include "specphen/pipeline.hpp"
#include "specphen/synth.hpp"

namespace py = pybind11;
using namespace specphen;

namespace {

DemeanedSeries demean_values(const std::vector<double>& values) {
  CountySeries s;
  s.fips = "00000";
  for (std::size_t i = 0; i < values.size(); ++i) {
    s.years.push_back(2000 + static_cast<int>(i));
    s.rates.push_back(values[i]);
  }
  return demean(s);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "spectral and bispectral phenotyping of annual spatial panels";

  m.def(
      "demean",
      [](const std::vector<double>& values) {
        const DemeanedSeries d = demean_values(values);
        return py::make_tuple(d.values, d.mean);
      },
      py::arg("values"), "Center a series; returns (centered, mean).");

  m.def(
      "dft",
      [](const std::vector<double>& values) { return dft(values).values; },
      py::arg("values"),
      "Full-length DFT with the t = 1..T phase convention; returns T complex "
      "coefficients.");

  m.def(
      "periodogram",
      [](const std::vector<double>& values) {
        return raw_periodogram(dft(demean_values(values).values));
      },
      py::arg("values"),
      "Raw periodogram |X(k)|^2 / T of the demeaned series, k = 1..floor(T/2).");

  m.def(
      "spectrum",
      [](const std::vector<double>& values, double taper, const std::vector<int>& spans) {
        const SpectrumEstimate s = estimate_spectrum(demean_values(values), taper, spans);
        py::dict out;
        out["freqs"] = s.freqs;
        out["raw"] = s.raw;
        out["smoothed"] = s.smoothed;
        return out;
      },
      py::arg("values"), py::arg("taper") = 0.1, py::arg("spans") = std::vector<int>{3},
      "Tapered, modified-Daniell-smoothed spectral density of a series.");

  m.def(
      "band_power",
      [](const std::vector<double>& values, double taper, const std::vector<int>& spans,
         double low_upper, double mid_upper) {
        const SpectrumEstimate s = estimate_spectrum(demean_values(values), taper, spans);
        const BandPower bp = band_power(s, BandPartition{low_upper, mid_upper});
        return py::make_tuple(bp.p_low, bp.p_mid, bp.p_high);
      },
      py::arg("values"), py::arg("taper") = 0.1, py::arg("spans") = std::vector<int>{3},
      py::arg("low_upper") = 0.15, py::arg("mid_upper") = 0.30,
      "Band powers (p_low, p_mid, p_high) of a series.");

  m.def(
      "bispectral_intensity",
      [](const std::vector<double>& values) {
        BispectrumSummary b = bispectrum_direct(dft(demean_values(values).values));
        const double intensity = bispectral_intensity(b);
        return py::make_tuple(intensity, b.domain_size);
      },
      py::arg("values"),
      "Mean squared direct-bispectrum magnitude of a series; returns "
      "(intensity, domain_size).");

  m.def(
      "kmeans",
      [](const std::vector<std::vector<double>>& rows, int k, int restarts, std::uint64_t seed) {
        FeatureMatrix f;
        for (std::size_t i = 0; i < rows.size(); ++i) {
          char buf[16];
          std::snprintf(buf, sizeof(buf), "%05zu", i + 1);
          f.unit_ids.emplace_back(buf);
        }
        if (!rows.empty()) {
          for (std::size_t j = 0; j < rows[0].size(); ++j) {
            f.columns.push_back("x" + std::to_string(j));
          }
        }
        f.values = rows;
        const ClusterModel model = kmeans(standardize(f), k, restarts, seed);
        std::vector<int> labels;
        labels.reserve(rows.size());
        for (const auto& id : f.unit_ids) labels.push_back(model.assignments.at(id));
        return py::make_tuple(labels, model.centroids, model.wss);
      },
      py::arg("rows"), py::arg("k"), py::arg("restarts") = 50, py::arg("seed") = 0,
      "Standardize rows and run k-means; returns (labels, centroids, wss).");

  m.def(
      "find_breakpoint",
      [](const std::vector<double>& rates, int start_year, int h) {
        CountySeries s;
        s.fips = "00000";
        for (std::size_t i = 0; i < rates.size(); ++i) {
          s.years.push_back(start_year + static_cast<int>(i));
          s.rates.push_back(rates[i]);
        }
        const BreakFit fit = find_breakpoint(s, h);
        py::dict out;
        out["tau_index"] = fit.tau_index;
        out["break_year"] = fit.break_year;
        out["beta1"] = fit.beta1;
        out["beta2"] = fit.beta2;
        out["delta_beta"] = fit.delta_beta;
        out["rss"] = fit.rss;
        return out;
      },
      py::arg("rates"), py::arg("start_year") = 2003, py::arg("h") = 5,
      "Exhaustive single-break piecewise-linear fit.");

  m.def(
      "morans_i",
      [](const std::map<std::string, double>& values,
         const std::vector<std::pair<std::string, std::string>>& links) {
        std::vector<std::string> ids;
        for (const auto& [id, v] : values) ids.push_back(id);
        return morans_i(values, SpatialWeights::from_links(ids, links));
      },
      py::arg("values"), py::arg("links"),
      "Global Moran's I over binary symmetric links.");

  m.def(
      "moran_permutation",
      [](const std::map<std::string, double>& values,
         const std::vector<std::pair<std::string, std::string>>& links, int n_permutations,
         std::uint64_t seed) {
        std::vector<std::string> ids;
        for (const auto& [id, v] : values) ids.push_back(id);
        const MoranResult r = moran_permutation(values, SpatialWeights::from_links(ids, links),
                                                n_permutations, seed);
        py::dict out;
        out["observed_i"] = r.observed_i;
        out["expected_i"] = r.expected_i;
        out["p_value"] = r.p_value;
        out["n_used"] = r.n_used;
        return out;
      },
      py::arg("values"), py::arg("links"), py::arg("n_permutations") = 999, py::arg("seed") = 0,
      "Permutation test for Moran's I (one-sided greater).");

  m.def(
      "spearman",
      [](const std::vector<double>& x, const std::vector<double>& y) { return spearman(x, y); },
      py::arg("x"), py::arg("y"), "Spearman rank correlation with mid-ranks.");

  m.def(
      "run_pipeline",
      [](const py::dict& options) {
        PipelineConfig config;
        for (const auto& item : options) {
          apply_config_entry(config, py::cast<std::string>(item.first),
                             py::cast<std::string>(py::str(item.second)));
        }
        const ArtifactManifest manifest = run_pipeline(config);
        py::list out;
        for (const auto& a : manifest.artifacts) {
          py::dict entry;
          entry["name"] = a.name;
          entry["bytes"] = a.bytes;
          entry["fnv1a64"] = a.fnv1a64;
          out.append(entry);
        }
        return out;
      },
      py::arg("options"),
      "Run the full pipeline; options use the dotted config keys, e.g. "
      "{'input.panel': 'panel.csv', 'input.polygons': 'polygons.geojson', "
      "'output.dir': 'out'}.");
}
