#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "perimode/operators.hpp"
#include "perimode/signal.hpp"
#include "perimode/solver.hpp"
#include "perimode/types.hpp"

namespace perimode {

using Json = nlohmann::json;

namespace detail {

inline std::string format_double(double x) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", x);
  return buffer;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

inline double parse_double(const std::string& s) {
  try {
    std::size_t pos = 0;
    const double value = std::stod(s, &pos);
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos != s.size()) throw DataError("trailing characters in numeric field: " + s);
    return value;
  } catch (const std::invalid_argument&) {
    throw DataError("not a number: " + s);
  } catch (const std::out_of_range&) {
    throw DataError("number out of range: " + s);
  }
}

inline Complex complex_from_json(const Json& j) {
  if (j.is_number()) return Complex(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return Complex(j[0].get<double>(), j[1].get<double>());
  throw DataError("complex entry must be a number or [re, im]");
}

inline Json complex_to_json(const Complex& z) { return Json::array({z.real(), z.imag()}); }

}  // namespace detail

// ---------------------------------------------------------------------------
// Signal CSV: header "t,v0,v1,..." for real signals or "t,re0,im0,re1,im1,..."
// for complex ones; one row per grid point t_j = 2*pi*j/N, sorted by t.
// ---------------------------------------------------------------------------

inline std::string signal_to_csv(const PeriodicSignal& f, bool force_complex = false) {
  // Signals that are real up to rounding noise are written in real columns.
  const bool complex_format =
      force_complex || !f.is_real(1e-12 * std::max(1.0, f.sup_norm()));
  std::string out = "t";
  for (int i = 0; i < f.dim(); ++i) {
    if (complex_format)
      out += ",re" + std::to_string(i) + ",im" + std::to_string(i);
    else
      out += ",v" + std::to_string(i);
  }
  out += "\n";
  for (int j = 0; j < f.size(); ++j) {
    out += detail::format_double(f.grid_point(j));
    for (int i = 0; i < f.dim(); ++i) {
      const Complex v = f.values()(i, j);
      out += "," + detail::format_double(v.real());
      if (complex_format) out += "," + detail::format_double(v.imag());
    }
    out += "\n";
  }
  return out;
}

inline PeriodicSignal signal_from_csv(const std::string& text) {
  std::stringstream ss(text);
  std::string line;
  if (!std::getline(ss, line)) throw DataError("empty signal file");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  const std::vector<std::string> header = detail::split_csv_line(line);
  if (header.size() < 2 || header[0] != "t")
    throw DataError("signal header must start with column t");
  bool complex_format = false;
  int d = 0;
  if (header[1] == "v0") {
    d = static_cast<int>(header.size()) - 1;
  } else if (header[1] == "re0") {
    if ((header.size() - 1) % 2 != 0)
      throw DataError("complex signal header needs re/im column pairs");
    complex_format = true;
    d = static_cast<int>(header.size() - 1) / 2;
  } else {
    throw DataError("signal header must list v0 or re0 after t");
  }

  std::vector<double> times;
  std::vector<std::vector<Complex>> rows;
  while (std::getline(ss, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = detail::split_csv_line(line);
    if (fields.size() != header.size())
      throw DataError("signal row has wrong number of fields");
    times.push_back(detail::parse_double(fields[0]));
    std::vector<Complex> row(d);
    for (int i = 0; i < d; ++i) {
      if (complex_format)
        row[i] = Complex(detail::parse_double(fields[1 + 2 * i]),
                         detail::parse_double(fields[2 + 2 * i]));
      else
        row[i] = Complex(detail::parse_double(fields[1 + i]), 0.0);
    }
    rows.push_back(std::move(row));
  }
  const int N = static_cast<int>(rows.size());
  if (N == 0) throw DataError("signal file has no sample rows");

  PeriodicSignal f = PeriodicSignal::zeros(d, N);
  for (int j = 0; j < N; ++j) {
    const double expected = kTwoPi * j / N;
    if (std::abs(times[j] - expected) > 1e-8)
      throw DataError("signal rows must sit on the uniform grid 2*pi*j/N, sorted by t");
    for (int i = 0; i < d; ++i) f.values()(i, j) = rows[j][i];
  }
  return f;
}

// ---------------------------------------------------------------------------
// Signal JSON: {"N": int, "d": int, "complex": bool, "samples": [[...], ...]}
// with each sample row holding d reals, or 2d reals interleaved re,im.
// ---------------------------------------------------------------------------

inline Json signal_to_json(const PeriodicSignal& f, bool force_complex = false) {
  const bool complex_format =
      force_complex || !f.is_real(1e-12 * std::max(1.0, f.sup_norm()));
  Json samples = Json::array();
  for (int j = 0; j < f.size(); ++j) {
    Json row = Json::array();
    for (int i = 0; i < f.dim(); ++i) {
      const Complex v = f.values()(i, j);
      row.push_back(v.real());
      if (complex_format) row.push_back(v.imag());
    }
    samples.push_back(std::move(row));
  }
  return Json{{"N", f.size()},
              {"d", f.dim()},
              {"complex", complex_format},
              {"samples", std::move(samples)}};
}

inline PeriodicSignal signal_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("N") || !j.contains("d") ||
      !j.contains("complex") || !j.contains("samples"))
    throw DataError("signal JSON needs keys N, d, complex, samples");
  const int N = j["N"].get<int>();
  const int d = j["d"].get<int>();
  const bool complex_format = j["complex"].get<bool>();
  if (N <= 0 || d <= 0) throw DataError("signal JSON needs positive N and d");
  const Json& samples = j["samples"];
  if (!samples.is_array() || static_cast<int>(samples.size()) != N)
    throw DataError("signal JSON samples must hold N rows");

  PeriodicSignal f = PeriodicSignal::zeros(d, N);
  const std::size_t row_len = complex_format ? 2 * d : d;
  for (int jj = 0; jj < N; ++jj) {
    const Json& row = samples[jj];
    if (!row.is_array() || row.size() != row_len)
      throw DataError("signal JSON sample row has wrong length");
    for (int i = 0; i < d; ++i) {
      if (complex_format)
        f.values()(i, jj) =
            Complex(row[2 * i].get<double>(), row[2 * i + 1].get<double>());
      else
        f.values()(i, jj) = Complex(row[i].get<double>(), 0.0);
    }
  }
  return f;
}

// ---------------------------------------------------------------------------
// Operator JSON: {"kind": "...", "dim": int, "entries": [...]} with complex
// entries encoded as numbers or [re, im]; dirichlet_laplacian uses {"n": int}.
// Tridiagonal entries are ordered [diagonal..., sub..., super...].
// ---------------------------------------------------------------------------

inline LinearOperatorHandle operator_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("kind"))
    throw DataError("operator JSON needs a kind");
  const std::string kind = j["kind"].get<std::string>();

  const auto need_entries = [&](std::size_t count) {
    if (!j.contains("entries") || !j["entries"].is_array() ||
        j["entries"].size() != count)
      throw DataError("operator JSON entries have wrong length for kind " + kind);
    return j["entries"];
  };
  const auto need_dim = [&]() {
    if (!j.contains("dim")) throw DataError("operator JSON needs dim");
    const int dim = j["dim"].get<int>();
    if (dim <= 0) throw DataError("operator dim must be positive");
    return dim;
  };

  if (kind == "dense") {
    const int dim = need_dim();
    const Json entries = need_entries(static_cast<std::size_t>(dim) * dim);
    Mat m(dim, dim);
    for (int r = 0; r < dim; ++r)
      for (int c = 0; c < dim; ++c)
        m(r, c) = detail::complex_from_json(entries[r * dim + c]);
    return LinearOperatorHandle::dense(m);
  }
  if (kind == "tridiagonal") {
    const int dim = need_dim();
    const Json entries = need_entries(static_cast<std::size_t>(3 * dim - 2));
    Vec diag(dim), sub(dim - 1), super(dim - 1);
    for (int i = 0; i < dim; ++i) diag[i] = detail::complex_from_json(entries[i]);
    for (int i = 0; i < dim - 1; ++i)
      sub[i] = detail::complex_from_json(entries[dim + i]);
    for (int i = 0; i < dim - 1; ++i)
      super[i] = detail::complex_from_json(entries[2 * dim - 1 + i]);
    return LinearOperatorHandle::tridiagonal(sub, diag, super);
  }
  if (kind == "diagonal") {
    const int dim = need_dim();
    const Json entries = need_entries(static_cast<std::size_t>(dim));
    Vec diag(dim);
    for (int i = 0; i < dim; ++i) diag[i] = detail::complex_from_json(entries[i]);
    return LinearOperatorHandle::diagonal(diag);
  }
  if (kind == "scalar") {
    const Json entries = need_entries(1);
    return LinearOperatorHandle::scalar(detail::complex_from_json(entries[0]));
  }
  if (kind == "dirichlet_laplacian") {
    if (!j.contains("n")) throw DataError("dirichlet_laplacian needs n");
    const int n = j["n"].get<int>();
    if (n <= 0) throw DataError("dirichlet_laplacian needs positive n");
    return dirichlet_laplacian(n);
  }
  throw UnsupportedKindError("unknown operator kind: " + kind);
}

inline Json operator_to_json(const LinearOperatorHandle& A) {
  Json j;
  j["kind"] = to_string(A.kind());
  j["dim"] = A.dim();
  Json entries = Json::array();
  switch (A.kind()) {
    case OperatorKind::dense: {
      const Mat m = A.dense_matrix();
      for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c)
          entries.push_back(detail::complex_to_json(m(r, c)));
      break;
    }
    case OperatorKind::tridiagonal: {
      const Mat m = A.dense_matrix();
      for (int i = 0; i < m.rows(); ++i)
        entries.push_back(detail::complex_to_json(m(i, i)));
      for (int i = 0; i + 1 < m.rows(); ++i)
        entries.push_back(detail::complex_to_json(m(i + 1, i)));
      for (int i = 0; i + 1 < m.rows(); ++i)
        entries.push_back(detail::complex_to_json(m(i, i + 1)));
      break;
    }
    case OperatorKind::diagonal: {
      const Mat m = A.dense_matrix();
      for (int i = 0; i < m.rows(); ++i)
        entries.push_back(detail::complex_to_json(m(i, i)));
      break;
    }
    case OperatorKind::scalar:
      entries.push_back(detail::complex_to_json(A.dense_matrix()(0, 0)));
      break;
  }
  j["entries"] = std::move(entries);
  return j;
}

// ---------------------------------------------------------------------------
// Report serializers.
// ---------------------------------------------------------------------------

inline Json gate_to_json(const SpectrumGateReport& gate) {
  return Json{{"window", Json::array({gate.window.lo, gate.window.hi})},
              {"singular_modes", gate.singular_modes},
              {"margins", gate.margins},
              {"operator_norm", gate.operator_norm},
              {"k_star", gate.k_star},
              {"certified_complete", gate.certified_complete},
              {"eigen_route_modes", gate.eigen_route_modes},
              {"routes_agree", gate.routes_agree}};
}

inline Json solve_report_to_json(const SolveReport& report) {
  return Json{{"residual_l2", report.residual_l2},
              {"residual_sup", report.residual_sup},
              {"K", report.K},
              {"N", report.N},
              {"gate", gate_to_json(report.gate)}};
}

inline Json spectrum_report_to_json(const SpectrumGateReport& gate,
                                    const SpectrumReport& spectrum) {
  Json eigenvalues = Json::array();
  for (const Complex& mu : spectrum.eigenvalues)
    eigenvalues.push_back(detail::complex_to_json(mu));
  Json j = gate_to_json(gate);
  j["sigma_Z"] = gate.singular_modes;
  j["eigenvalues"] = std::move(eigenvalues);
  j["eigen_method"] = spectrum.method;
  j["eigen_max_residual"] = spectrum.max_residual;
  return j;
}

// ---------------------------------------------------------------------------
// Small file helpers.
// ---------------------------------------------------------------------------

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write file: " + path);
  out << content;
}

inline Json parse_json(const std::string& text) {
  Json j = Json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw DataError("malformed JSON");
  return j;
}

}  // namespace perimode
