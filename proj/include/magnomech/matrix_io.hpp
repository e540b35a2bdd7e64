#pragma once

#include <Eigen/Dense>
#include <string>

namespace magnomech {

/// Binary-exact matrix dump. Layout: one header line
///   MAGNOMECHMAT1 <json>\n
/// followed by rows·cols little-endian IEEE doubles in column-major order.
/// The JSON header records dimensions plus caller metadata (quadrature
/// ordering, units, config hash).
void save_matrix(const std::string& path, const Eigen::MatrixXd& m,
                 const std::string& meta_json);

struct LoadedMatrix {
  Eigen::MatrixXd matrix;
  std::string meta_json;
};

LoadedMatrix load_matrix(const std::string& path);

}  // namespace magnomech
