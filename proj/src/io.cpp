#include "levylab/io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace levylab {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path,
                     const std::vector<std::string>& header) {
  file_ = std::fopen(path.c_str(), "wb");
  if (!file_) throw std::runtime_error("cannot open '" + path + "' for write");
  for (std::size_t i = 0; i < header.size(); ++i) {
    std::fprintf(file_, "%s%s", i ? "," : "", header[i].c_str());
  }
  std::fprintf(file_, "\n");
}

CsvWriter::~CsvWriter() {
  if (file_) std::fclose(file_);
}

void CsvWriter::row(const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::fprintf(file_, "%s%s", i ? "," : "", format_double(values[i]).c_str());
  }
  std::fprintf(file_, "\n");
}

void CsvWriter::raw_row(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    std::fprintf(file_, "%s%s", i ? "," : "", cells[i].c_str());
  }
  std::fprintf(file_, "\n");
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for write");
  out << content;
}

void write_json_file(const std::string& path, const Json& body) {
  write_text_file(path, body.dump(2) + "\n");
}

Json to_json(const AssumptionReport& report) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["all_pass"] = report.all_pass;
  Json clauses = Json::array();
  for (const auto& c : report.clauses) {
    Json e;
    e["clause"] = c.clause;
    e["verdict"] = to_string(c.verdict);
    e["value"] = c.value;
    e["error_estimate"] = c.error_estimate;
    if (!c.detail.empty()) e["detail"] = c.detail;
    clauses.push_back(e);
  }
  j["clauses"] = clauses;
  j["K0"] = report.k0;
  j["J_script"] = report.j_script;
  j["c1"] = report.c1;
  j["c2"] = report.c2;
  j["xi_estimate"] = report.xi_estimate;
  if (report.xi_declared) j["xi_declared"] = *report.xi_declared;
  Json deltas = Json::array();
  for (const auto& d : report.delta_table) {
    deltas.push_back({{"b", d.b}, {"eps", d.eps}, {"delta", d.delta}});
  }
  j["delta_table"] = deltas;
  j["grids"] = {{"box_halfwidth", report.spec.box_halfwidth},
                {"x_per_axis", report.spec.x_per_axis},
                {"pair_separations", report.spec.pair_separations},
                {"h_per_decade", report.spec.h_per_decade},
                {"h_radius_floor", report.spec.h_radius_floor},
                {"delta_floor", report.spec.delta_floor}};
  return j;
}

Json to_json(const MartingaleReport& report) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["all_pass"] = report.all_pass;
  j["worst_sigmas"] = report.worst_sigmas;
  Json cells = Json::array();
  for (const auto& c : report.cells) {
    cells.push_back({{"f", c.f_tag},
                     {"s", c.s},
                     {"t", c.t},
                     {"weight", c.weight_tag},
                     {"residual", c.residual},
                     {"stderr", c.stderr_},
                     {"pass", c.pass},
                     {"inconclusive", c.inconclusive}});
  }
  j["cells"] = cells;
  return j;
}

Json to_json(const PerturbationGapReport& report) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["lambda"] = report.lambda;
  j["xi"] = report.xi;
  j["J_script"] = report.j_script;
  j["max_g"] = report.max_g;
  j["bound"] = report.bound;
  j["measured_sup"] = report.measured_sup;
  j["numeric_error"] = report.numeric_error;
  j["within_bound"] = report.within_bound;
  j["contraction_applicable"] = report.contraction_applicable;
  j["contraction_ok"] = report.contraction_ok;
  j["fft_residual"] = report.fft_residual;
  return j;
}

Json to_json(const TauChainStats& stats) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["eta"] = stats.eta;
  j["depth"] = stats.depth;
  j["gamma_fit"] = stats.gamma_fit;
  j["gamma_r_squared"] = stats.gamma_r_squared;
  j["extend_horizon_warning"] = stats.extend_horizon_warning;
  Json moments = Json::array();
  for (int i = 0; i < stats.depth; ++i) {
    moments.push_back({{"i", i + 1},
                       {"estimate", stats.exp_moment[i].mean},
                       {"stderr", stats.exp_moment[i].stderr_},
                       {"n_samples", stats.exp_moment[i].n},
                       {"censor_rate", stats.censor_rate[i]}});
  }
  j["exp_moments"] = moments;
  Json cdf = Json::array();
  for (std::size_t i = 0; i < stats.tau1_cdf_t.size(); ++i) {
    cdf.push_back({{"t", stats.tau1_cdf_t[i]},
                   {"p", stats.tau1_cdf_p[i]},
                   {"stderr", stats.tau1_cdf_stderr[i]}});
  }
  j["tau1_cdf"] = cdf;
  return j;
}

Json to_json(const ExitTimeReport& report) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["dt"] = report.dt;
  j["refine_warning"] = report.refine_warning;
  Json rows = Json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"r", r.radius},
                    {"E_tau", r.mean_exit},
                    {"stderr", r.stderr_},
                    {"censor_rate", r.censor_rate},
                    {"L_r", r.big_l},
                    {"product", r.product}});
  }
  j["rows"] = rows;
  return j;
}

Json to_json(const ResolventContinuityReport& report) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["gamma_fit"] = report.gamma_fit;
  j["decaying"] = report.decaying;
  Json rows = Json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"offset", r.offset},
                    {"modulus", r.modulus},
                    {"stderr", r.stderr_},
                    {"inconclusive", r.inconclusive}});
  }
  j["rows"] = rows;
  return j;
}

}  // namespace levylab
