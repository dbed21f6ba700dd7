#include "oseen/io.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace oseen {

std::string format_double(double value)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

void write_vtk(std::ostream& out, const TriMesh& mesh, const std::vector<VtkArray>& point_data,
               const std::vector<VtkArray>& cell_data, std::string_view title)
{
    const auto nv = static_cast<std::size_t>(mesh.num_vertices());
    const auto nc = static_cast<std::size_t>(mesh.num_cells());

    out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << nv << " double\n";
    for (const auto& p : mesh.vertices()) {
        out << format_double(p.x()) << ' ' << format_double(p.y()) << " 0\n";
    }
    out << "CELLS " << nc << ' ' << 4 * nc << '\n';
    for (const auto& c : mesh.cells()) {
        out << "3 " << c[0] << ' ' << c[1] << ' ' << c[2] << '\n';
    }
    out << "CELL_TYPES " << nc << '\n';
    for (std::size_t c = 0; c < nc; ++c) {
        out << "5\n";
    }

    auto write_arrays = [&out](const std::vector<VtkArray>& arrays, std::size_t n) {
        for (const auto& a : arrays) {
            if (a.components != 1 && a.components != 2) {
                throw std::invalid_argument("write_vtk: array '" + a.name + "' must have 1 or 2 components");
            }
            if (a.values.size() != n * static_cast<std::size_t>(a.components)) {
                throw std::invalid_argument("write_vtk: array '" + a.name + "' has wrong length");
            }
            if (a.components == 1) {
                out << "SCALARS " << a.name << " double 1\nLOOKUP_TABLE default\n";
                for (double v : a.values) {
                    out << format_double(v) << '\n';
                }
            } else {
                out << "VECTORS " << a.name << " double\n";
                for (std::size_t i = 0; i < n; ++i) {
                    out << format_double(a.values[2 * i]) << ' ' << format_double(a.values[2 * i + 1])
                        << " 0\n";
                }
            }
        }
    };
    if (!point_data.empty()) {
        out << "POINT_DATA " << nv << '\n';
        write_arrays(point_data, nv);
    }
    if (!cell_data.empty()) {
        out << "CELL_DATA " << nc << '\n';
        write_arrays(cell_data, nc);
    }
}

void write_mesh_text(std::ostream& out, const TriMesh& mesh)
{
    out << mesh.num_vertices() << ' ' << mesh.num_cells() << ' ' << mesh.boundary_edges().size() << '\n';
    for (const auto& p : mesh.vertices()) {
        out << format_double(p.x()) << ' ' << format_double(p.y()) << '\n';
    }
    for (const auto& c : mesh.cells()) {
        out << c[0] << ' ' << c[1] << ' ' << c[2] << '\n';
    }
    for (const auto& e : mesh.boundary_edges()) {
        out << e.vertices[0] << ' ' << e.vertices[1] << ' ' << static_cast<int>(e.marker) << '\n';
    }
}

TriMesh read_mesh_text(std::istream& in)
{
    long nv = -1, nc = -1, nb = -1;
    if (!(in >> nv >> nc >> nb) || nv < 3 || nc < 1 || nb < 0) {
        throw std::invalid_argument("read_mesh_text: bad header, expected 'nv nc nb'");
    }
    std::vector<Vec2> vertices(static_cast<std::size_t>(nv));
    for (auto& p : vertices) {
        if (!(in >> p.x() >> p.y())) {
            throw std::invalid_argument("read_mesh_text: truncated vertex block");
        }
    }
    std::vector<std::array<int, 3>> cells(static_cast<std::size_t>(nc));
    for (auto& c : cells) {
        if (!(in >> c[0] >> c[1] >> c[2])) {
            throw std::invalid_argument("read_mesh_text: truncated cell block");
        }
    }
    std::vector<BoundaryEdge> edges(static_cast<std::size_t>(nb));
    for (auto& e : edges) {
        int marker = -1;
        if (!(in >> e.vertices[0] >> e.vertices[1] >> marker) || marker < 0 || marker > 2) {
            throw std::invalid_argument("read_mesh_text: bad boundary edge line");
        }
        e.marker = static_cast<BoundaryMarker>(marker);
    }
    return TriMesh(std::move(vertices), std::move(cells), std::move(edges));
}

void write_matrix_market(std::ostream& out, const Eigen::SparseMatrix<double, Eigen::RowMajor>& matrix)
{
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << matrix.rows() << ' ' << matrix.cols() << ' ' << matrix.nonZeros() << '\n';
    for (Eigen::Index r = 0; r < matrix.outerSize(); ++r) {
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(matrix, r); it; ++it) {
            out << it.row() + 1 << ' ' << it.col() + 1 << ' ' << format_double(it.value()) << '\n';
        }
    }
}

void write_matrix_market(std::ostream& out, const Eigen::VectorXd& vector)
{
    out << "%%MatrixMarket matrix array real general\n";
    out << vector.size() << " 1\n";
    for (Eigen::Index i = 0; i < vector.size(); ++i) {
        out << format_double(vector[i]) << '\n';
    }
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content)
{
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) {
            throw std::runtime_error("write failed for " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

} // namespace oseen
