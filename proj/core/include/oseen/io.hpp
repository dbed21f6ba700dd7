#pragma once

#include "oseen/mesh.hpp"

#include <Eigen/Sparse>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace oseen {

/// A named data array attached to mesh points or cells; `components` is 1
/// (scalars) or 2 (vectors, padded with z = 0 on output).
struct VtkArray {
    std::string name;
    int components = 1;
    std::vector<double> values;
};

/// Legacy VTK unstructured grid (ASCII) with triangle cells.
void write_vtk(std::ostream& out, const TriMesh& mesh, const std::vector<VtkArray>& point_data,
               const std::vector<VtkArray>& cell_data, std::string_view title = "oseen");

/// Plain text mesh: header `nv nc nb`, then nv lines `x y`, nc lines
/// `a b c`, nb lines `a b marker` with marker 0 = WALL, 1 = INLET, 2 = OUTLET.
void write_mesh_text(std::ostream& out, const TriMesh& mesh);
TriMesh read_mesh_text(std::istream& in);

/// MatrixMarket coordinate format (general, real), 1-based indices.
void write_matrix_market(std::ostream& out,
                         const Eigen::SparseMatrix<double, Eigen::RowMajor>& matrix);
void write_matrix_market(std::ostream& out, const Eigen::VectorXd& vector);

/// Writes `content` to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Shortest round-trip decimal form of a double ("%.17g").
std::string format_double(double value);

} // namespace oseen
