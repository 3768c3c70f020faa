#pragma once

// Serialization: JSON for certificates, partitions and the example systems,
// CSV for norm tables and matrices, and a compact binary matrix layout.

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "klab/certificate.hpp"
#include "klab/constructions.hpp"
#include "klab/smoothops.hpp"
#include "klab/subalgebra.hpp"

namespace klab {

using Json = nlohmann::json;

inline std::string format_double(double x) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
  double x = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw std::invalid_argument("cannot parse number '" + std::string(s) + "'");
  }
  return x;
}

// --- certificates ----------------------------------------------------------

inline Json to_json(const Witness& w) {
  return Json{{"params", w.params}, {"lhs", w.lhs.to_string()}, {"rhs", w.rhs.to_string()}};
}

inline Json to_json(const Certificate& c) {
  Json constants = Json::object();
  for (const auto& [name, v] : c.constants) constants[name] = v.to_string();
  Json witnesses = Json::array();
  for (const auto& w : c.witnesses) witnesses.push_back(to_json(w));
  return Json{{"condition", c.condition},
              {"status", std::string(to_string(c.status))},
              {"bounds", c.bounds},
              {"constants", std::move(constants)},
              {"witnesses", std::move(witnesses)},
              {"notes", c.notes}};
}

inline Certificate certificate_from_json(const Json& j) {
  Certificate c;
  c.condition = j.at("condition").get<std::string>();
  c.status = status_from_string(j.at("status").get<std::string>());
  c.bounds = j.at("bounds").get<std::map<std::string, std::int64_t>>();
  for (const auto& [name, v] : j.at("constants").items()) c.constants[name] = LogTower::parse(v.get<std::string>());
  for (const auto& w : j.at("witnesses")) {
    c.witnesses.push_back({w.at("params").get<std::map<std::string, std::int64_t>>(),
                           LogTower::parse(w.at("lhs").get<std::string>()),
                           LogTower::parse(w.at("rhs").get<std::string>())});
  }
  if (j.contains("notes")) c.notes = j.at("notes").get<std::string>();
  return c;
}

// --- partitions ------------------------------------------------------------

inline Json to_json(const Partition& p) { return Json{{"n", p.n}, {"n0", p.n0}, {"classes", p.classes}}; }

inline Partition partition_from_json(const Json& j) {
  Partition p;
  p.n0 = j.at("n0").get<IndexSet>();
  p.classes = j.at("classes").get<std::vector<IndexSet>>();
  if (j.contains("n")) {
    p.n = j.at("n").get<std::size_t>();
  } else {
    for (std::size_t x : p.n0) p.n = std::max(p.n, x);
    for (const auto& c : p.classes) p.n = std::max(p.n, c.back());
  }
  p.validate();
  return p;
}

// --- systems ---------------------------------------------------------------

namespace detail {
inline Json tower_grid(const std::vector<std::vector<LogTower>>& g) {
  Json out = Json::array();
  for (const auto& row : g) {
    Json r = Json::array();
    for (const auto& x : row) r.push_back(x.to_string());
    out.push_back(std::move(r));
  }
  return out;
}

inline Json tower_list(const std::vector<LogTower>& v) {
  Json out = Json::array();
  for (const auto& x : v) out.push_back(x.to_string());
  return out;
}
}  // namespace detail

inline Json to_json(const TowerSystem& s) {
  return Json{{"K", s.K},
              {"J", s.J},
              {"m", s.m},
              {"N", detail::tower_grid(s.N)},
              {"c", detail::tower_list(s.c)},
              {"a", detail::tower_grid(s.a)},
              {"tail_bound", detail::tower_list(s.tail_bound)}};
}

inline Json to_json(const SeqVector& x) {
  Json values = Json::array();
  for (Complex v : x.values()) values.push_back(Json::array({v.real(), v.imag()}));
  return Json{{"indices", Json(std::vector<std::size_t>(x.support().begin(), x.support().end()))},
              {"values", std::move(values)}};
}

inline SeqVector seqvector_from_json(const Json& j) {
  auto idx = j.at("indices").get<std::vector<std::size_t>>();
  std::vector<Complex> val;
  for (const auto& v : j.at("values")) {
    if (v.is_array()) {
      val.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
    } else {
      val.emplace_back(v.get<double>(), 0.0);
    }
  }
  return SeqVector(std::move(idx), std::move(val));
}

inline Json to_json(const OrthoSystem& s) {
  Json vectors = Json::array();
  for (const auto& f : s.vectors()) vectors.push_back(to_json(f));
  return Json{{"size", s.size()}, {"tol", s.tol()}, {"vectors", std::move(vectors)}};
}

inline OrthoSystem ortho_system_from_json(const Json& j) {
  std::vector<SeqVector> vs;
  for (const auto& v : j.at("vectors")) vs.push_back(seqvector_from_json(v));
  return OrthoSystem(std::move(vs), j.value("tol", kOrthoTolerance));
}

// --- CSV -------------------------------------------------------------------

inline void write_norm_table_csv(std::ostream& os, const GradedRule& rows, std::size_t K, unsigned Q) {
  os << "k,q,value\n";
  for (std::size_t k = 1; k <= K; ++k) {
    for (unsigned q = 0; q <= Q; ++q) os << k << ',' << q << ',' << rows(k, q).to_string() << '\n';
  }
}

inline void write_matrix_csv(std::ostream& os, const SmoothMatrix& m) {
  for (std::size_t i = 1; i <= m.dim(); ++i) {
    for (std::size_t j = 1; j <= m.dim(); ++j) {
      const Complex v = m(i, j);
      if (j > 1) os << ',';
      os << format_double(v.real()) << ':' << format_double(v.imag());
    }
    os << '\n';
  }
}

inline SmoothMatrix read_matrix_csv(std::istream& is) {
  std::vector<std::vector<Complex>> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<Complex> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      const auto colon = cell.find(':');
      if (colon == std::string::npos) throw std::invalid_argument("matrix CSV: cell '" + cell + "' is not re:im");
      row.emplace_back(parse_double(std::string_view(cell).substr(0, colon)),
                       parse_double(std::string_view(cell).substr(colon + 1)));
    }
    rows.push_back(std::move(row));
  }
  SmoothMatrix::Dense d(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.size()) {
      throw std::invalid_argument("matrix CSV: row " + std::to_string(i + 1) + " has " +
                                  std::to_string(rows[i].size()) + " cells, expected " +
                                  std::to_string(rows.size()));
    }
    for (std::size_t j = 0; j < rows.size(); ++j) {
      d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return SmoothMatrix(std::move(d));
}

// --- binary: uint64 dim, then row-major (re, im) float64 pairs, little-endian

namespace detail {
template <class T>
T to_little(T x) {
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &x, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    std::memcpy(&x, b, sizeof(T));
  }
  return x;
}

template <class T>
void put(std::ostream& os, T x) {
  x = to_little(x);
  os.write(reinterpret_cast<const char*>(&x), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  T x{};
  if (!is.read(reinterpret_cast<char*>(&x), sizeof(T))) throw std::runtime_error("matrix binary: truncated input");
  return to_little(x);
}
}  // namespace detail

inline void write_matrix_binary(std::ostream& os, const SmoothMatrix& m) {
  detail::put<std::uint64_t>(os, m.dim());
  for (std::size_t i = 1; i <= m.dim(); ++i) {
    for (std::size_t j = 1; j <= m.dim(); ++j) {
      detail::put(os, m(i, j).real());
      detail::put(os, m(i, j).imag());
    }
  }
}

inline SmoothMatrix read_matrix_binary(std::istream& is) {
  const auto dim = detail::get<std::uint64_t>(is);
  if (dim > (std::uint64_t{1} << 20)) throw std::runtime_error("matrix binary: implausible dimension");
  SmoothMatrix::Dense d(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    for (Eigen::Index j = 0; j < d.cols(); ++j) {
      const double re = detail::get<double>(is);
      const double im = detail::get<double>(is);
      d(i, j) = Complex(re, im);
    }
  }
  return SmoothMatrix(std::move(d));
}

}  // namespace klab
