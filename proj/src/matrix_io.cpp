#include "magnomech/matrix_io.hpp"

#include <fstream>
#include <sstream>

#include "magnomech/errors.hpp"

// Assumes a little-endian host with IEEE-754 doubles, as does the rest of
// the numerical stack.

namespace magnomech {

namespace {
constexpr const char* kMagic = "MAGNOMECHMAT1";
}

void save_matrix(const std::string& path, const Eigen::MatrixXd& m,
                 const std::string& meta_json) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::io, "cannot write matrix file: " + path);
  std::ostringstream header;
  header << kMagic << " {\"rows\": " << m.rows() << ", \"cols\": " << m.cols()
         << ", \"meta\": " << (meta_json.empty() ? "null" : meta_json) << "}\n";
  f << header.str();
  f.write(reinterpret_cast<const char*>(m.data()),
          static_cast<std::streamsize>(sizeof(double) * m.size()));
  if (!f) throw Error(ErrorCode::io, "write failed: " + path);
}

LoadedMatrix load_matrix(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::io, "cannot open matrix file: " + path);
  std::string header;
  if (!std::getline(f, header) || header.rfind(kMagic, 0) != 0)
    throw Error(ErrorCode::parse, "not a magnomech matrix file: " + path);

  // header is "<magic> {json}"; pull rows/cols out without a JSON dependency
  auto grab = [&](const std::string& key) -> long {
    auto pos = header.find("\"" + key + "\":");
    if (pos == std::string::npos)
      throw Error(ErrorCode::parse, "matrix header missing " + key + ": " + path);
    return std::strtol(header.c_str() + pos + key.size() + 3, nullptr, 10);
  };
  const long rows = grab("rows");
  const long cols = grab("cols");
  if (rows <= 0 || cols <= 0 || rows > 100000 || cols > 100000)
    throw Error(ErrorCode::parse, "implausible matrix dimensions in " + path);

  LoadedMatrix out;
  out.meta_json = header.substr(std::string(kMagic).size() + 1);
  out.matrix.resize(rows, cols);
  f.read(reinterpret_cast<char*>(out.matrix.data()),
         static_cast<std::streamsize>(sizeof(double) * rows * cols));
  if (f.gcount() != static_cast<std::streamsize>(sizeof(double) * rows * cols))
    throw Error(ErrorCode::io, "truncated matrix payload: " + path);
  return out;
}

}  // namespace magnomech
