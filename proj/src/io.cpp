#include "qot/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "qot/error.hpp"

namespace qot::io {

namespace {

Json real_rows(const CMatrix& m, bool imag) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(imag ? m(i, k).imag() : m(i, k).real());
    rows.push_back(std::move(row));
  }
  return rows;
}

RMatrix parse_rows(const Json& j, const char* field) {
  if (!j.is_array() || j.empty()) throw Error(ErrorKind::Parse, std::string(field) + " must be a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = j[0].is_array() ? static_cast<Eigen::Index>(j[0].size()) : 0;
  RMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw Error(ErrorKind::Parse, std::string(field) + " rows must have equal length");
    for (Eigen::Index k = 0; k < cols; ++k) {
      const Json& x = row[static_cast<std::size_t>(k)];
      if (!x.is_number()) throw Error(ErrorKind::Parse, std::string(field) + " entries must be numbers");
      m(i, k) = x.get<double>();
    }
  }
  return m;
}

}  // namespace

Json matrix_to_json(const CMatrix& m) { return {{"re", real_rows(m, false)}, {"im", real_rows(m, true)}}; }

CMatrix matrix_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("re")) throw Error(ErrorKind::Parse, "matrix needs an \"re\" field");
  const RMatrix re = parse_rows(j.at("re"), "re");
  RMatrix im = RMatrix::Zero(re.rows(), re.cols());
  if (j.contains("im")) {
    im = parse_rows(j.at("im"), "im");
    if (im.rows() != re.rows() || im.cols() != re.cols()) throw Error(ErrorKind::Parse, "re and im shapes differ");
  }
  CMatrix m(re.rows(), re.cols());
  m.real() = re;
  m.imag() = im;
  return m;
}

Json state_to_json(const DensityMatrix& rho) {
  Json j = matrix_to_json(rho.matrix());
  j["dim"] = rho.dim();
  return j;
}

DensityMatrix state_from_json(const Json& j) {
  const CMatrix m = matrix_from_json(j);
  if (j.contains("dim")) {
    if (!j.at("dim").is_number_integer()) throw Error(ErrorKind::Parse, "dim must be an integer");
    if (j.at("dim").get<long long>() != m.rows()) throw Error(ErrorKind::DimensionMismatch, "dim does not match the matrix");
  }
  return validate_state(m);
}

DensityMatrix load_state(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Parse, "cannot open " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::Parse, path + ": " + e.what());
  }
  return state_from_json(j);
}

Json solution_to_json(const TransportSolution& s) {
  return {{"value", s.value},
          {"dual_bound", s.dual_bound},
          {"gap", s.gap},
          {"iterations", s.iterations},
          {"converged", s.converged},
          {"method", s.method},
          {"marginal_residual", s.marginal_residual},
          {"primal_residual", s.primal_residual},
          {"dual_residual", s.dual_residual},
          {"dual_shift", s.dual_shift},
          {"rank", s.rank()},
          {"coupling", matrix_to_json(s.joint)},
          {"dual_a", matrix_to_json(s.dual_a)},
          {"dual_b", matrix_to_json(s.dual_b)}};
}

std::string number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

}  // namespace qot::io
