#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "classo/errors.hpp"

namespace classo {

// Flat binary matrix format for debugging dumps: 16-byte header
// (8-byte magic "CLASSOMX", uint32 rows, uint32 cols, little endian),
// then row-major float64 entries, little endian.
inline constexpr char kMatrixMagic[8] = {'C', 'L', 'A', 'S', 'S', 'O', 'M', 'X'};

inline void save_matrix(const std::string& path, const Eigen::MatrixXd& A) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("save_matrix: cannot open " + path);
    out.write(kMatrixMagic, 8);
    std::uint32_t dims[2] = {static_cast<std::uint32_t>(A.rows()),
                             static_cast<std::uint32_t>(A.cols())};
    out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.cols(); ++j) {
            double v = A(i, j);
            out.write(reinterpret_cast<const char*>(&v), sizeof(v));
        }
    if (!out) throw IoError("save_matrix: write failed for " + path);
}

inline Eigen::MatrixXd load_matrix(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("load_matrix: cannot open " + path);
    char magic[8];
    std::uint32_t dims[2];
    in.read(magic, 8);
    in.read(reinterpret_cast<char*>(dims), sizeof(dims));
    if (!in || std::memcmp(magic, kMatrixMagic, 8) != 0)
        throw IoError("load_matrix: bad header in " + path);
    Eigen::MatrixXd A(dims[0], dims[1]);
    for (std::uint32_t i = 0; i < dims[0]; ++i)
        for (std::uint32_t j = 0; j < dims[1]; ++j) {
            double v;
            in.read(reinterpret_cast<char*>(&v), sizeof(v));
            A(i, j) = v;
        }
    if (!in) throw IoError("load_matrix: truncated file " + path);
    return A;
}

}  // namespace classo
