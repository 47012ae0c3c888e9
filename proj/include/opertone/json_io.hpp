#pragma once
// Matrix JSON encoding and the number formatting used by every emitter.
// Output is produced by a small hand-rolled writer so that all numbers are
// printed with 17 significant digits (exact double round-trip) and the byte
// stream is reproducible; parsing goes through nlohmann::json.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "opertone/matrix.hpp"

namespace opertone {

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string fmt_u64(std::uint64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%llu", static_cast<unsigned long long>(v));
  return buf;
}

inline std::string json_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  out += '"';
  return out;
}

// {"n": int, "re": [[...]], "im": [[...]]} with row-major arrays.
inline std::string matrix_to_json(const CMat& m) {
  const int n = static_cast<int>(m.rows());
  std::string out = "{\"n\":" + std::to_string(n) + ",\"re\":[";
  for (int i = 0; i < n; ++i) {
    out += i ? ",[" : "[";
    for (int j = 0; j < n; ++j) {
      if (j) out += ',';
      out += fmt_double(m(i, j).real());
    }
    out += ']';
  }
  out += "],\"im\":[";
  for (int i = 0; i < n; ++i) {
    out += i ? ",[" : "[";
    for (int j = 0; j < n; ++j) {
      if (j) out += ',';
      out += fmt_double(m(i, j).imag());
    }
    out += ']';
  }
  out += "]}";
  return out;
}

inline std::string matrix_to_json(const ComplexMatrix& m) { return matrix_to_json(m.mat()); }
inline std::string matrix_to_json(const HermitianMatrix& m) { return matrix_to_json(m.mat()); }

namespace detail {

inline CMat matrix_from_json_obj(const nlohmann::json& j, bool hermitian) {
  if (!j.is_object() || !j.contains("n") || !j.contains("re"))
    throw Error("matrix JSON: expected object with \"n\" and \"re\"");
  const int n = j.at("n").get<int>();
  if (n < 1) throw Error("matrix JSON: n must be >= 1");
  CMat m = CMat::Zero(n, n);
  const auto& re = j.at("re");
  if (!re.is_array() || static_cast<int>(re.size()) != n)
    throw Error("matrix JSON: \"re\" must have n rows");
  for (int i = 0; i < n; ++i) {
    const auto& row = re.at(i);
    if (!row.is_array() || static_cast<int>(row.size()) != n)
      throw Error("matrix JSON: \"re\" rows must have n entries");
    for (int jj = 0; jj < n; ++jj)
      m(i, jj) = Complex(row.at(jj).get<double>(), 0.0);
  }
  if (j.contains("im")) {
    const auto& im = j.at("im");
    if (!im.is_array() || static_cast<int>(im.size()) != n)
      throw Error("matrix JSON: \"im\" must have n rows");
    for (int i = 0; i < n; ++i) {
      const auto& row = im.at(i);
      const int len = static_cast<int>(row.size());
      if (len == n) {
        for (int jj = 0; jj < n; ++jj)
          m(i, jj) += Complex(0.0, row.at(jj).get<double>());
      } else if (hermitian && len == n - i) {
        // Upper-triangle tail form: row i carries entries j = i..n-1.
        for (int jj = i; jj < n; ++jj)
          m(i, jj) += Complex(0.0, row.at(jj - i).get<double>());
      } else {
        throw Error("matrix JSON: \"im\" row has unexpected length");
      }
    }
    if (hermitian) {
      // Reconstruct the omitted lower triangle by conjugate symmetry.
      for (int i = 0; i < n; ++i) {
        m(i, i) = Complex(m(i, i).real(), 0.0);
        for (int jj = i + 1; jj < n; ++jj)
          m(jj, i) = Complex(m(jj, i).real(), -m(i, jj).imag());
      }
    }
  }
  return m;
}

}  // namespace detail

inline ComplexMatrix complex_matrix_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw Error(std::string("matrix JSON: parse failure: ") + e.what());
  }
  return ComplexMatrix(detail::matrix_from_json_obj(j, /*hermitian=*/false));
}

inline HermitianMatrix hermitian_matrix_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw Error(std::string("matrix JSON: parse failure: ") + e.what());
  }
  return HermitianMatrix(detail::matrix_from_json_obj(j, /*hermitian=*/true));
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write file: " + path);
  out << content;
}

}  // namespace opertone
