#include "oracles.hpp"

#include "oseen/io.hpp"

#include <gtest/gtest.h>

#include <Eigen/Sparse>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace oseen;

namespace {

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace

TEST(Vtk, LegacyStructure)
{
    const auto mesh = oracle::unit_square(2, TriPattern::Right);
    VtkArray p{"p", 1, std::vector<double>(static_cast<std::size_t>(mesh->num_vertices()), 1.5)};
    VtkArray u{"u", 2, std::vector<double>(static_cast<std::size_t>(2 * mesh->num_vertices()), 0.25)};
    VtkArray c{"cell_id", 1, {}};
    for (int i = 0; i < mesh->num_cells(); ++i) {
        c.values.push_back(i);
    }
    std::ostringstream out;
    write_vtk(out, *mesh, {p, u}, {c}, "t");
    const std::string s = out.str();
    EXPECT_EQ(s.rfind("# vtk DataFile Version 3.0\nt\nASCII\nDATASET UNSTRUCTURED_GRID\n", 0), 0u);
    EXPECT_NE(s.find("POINTS 9 double"), std::string::npos);
    EXPECT_NE(s.find("CELLS 8 32"), std::string::npos);
    EXPECT_NE(s.find("CELL_TYPES 8"), std::string::npos);
    EXPECT_NE(s.find("POINT_DATA 9"), std::string::npos);
    EXPECT_NE(s.find("SCALARS p double 1"), std::string::npos);
    EXPECT_NE(s.find("VECTORS u double"), std::string::npos);
    EXPECT_NE(s.find("CELL_DATA 8"), std::string::npos);
}

TEST(Vtk, WrongArraySizeThrows)
{
    const auto mesh = oracle::unit_square(1, TriPattern::Right);
    std::ostringstream out;
    EXPECT_THROW(write_vtk(out, *mesh, {{"p", 1, {1.0}}}, {}), std::invalid_argument);
}

TEST(MeshText, RoundTrip)
{
    const TriMesh m = build_rect_tri_mesh({0, 4, 0, 1}, 5, 3, TriPattern::CrissCross, true);
    std::stringstream s;
    write_mesh_text(s, m);
    const TriMesh r = read_mesh_text(s);
    ASSERT_EQ(r.num_vertices(), m.num_vertices());
    ASSERT_EQ(r.num_cells(), m.num_cells());
    for (int v = 0; v < m.num_vertices(); ++v) {
        EXPECT_EQ(r.vertex(v), m.vertex(v));
    }
    EXPECT_EQ(r.cells(), m.cells());
    ASSERT_EQ(r.boundary_edges().size(), m.boundary_edges().size());
    for (std::size_t i = 0; i < m.boundary_edges().size(); ++i) {
        EXPECT_EQ(r.boundary_edges()[i].vertices, m.boundary_edges()[i].vertices);
        EXPECT_EQ(r.boundary_edges()[i].marker, m.boundary_edges()[i].marker);
    }
}

TEST(MeshText, TruncatedInputThrows)
{
    std::istringstream in("3 1 3\n0 0\n1 0\n");
    EXPECT_ANY_THROW(read_mesh_text(in));
}

TEST(MatrixMarket, CoordinateFormat)
{
    Eigen::SparseMatrix<double, Eigen::RowMajor> a(2, 3);
    a.insert(0, 2) = 0.5;
    a.insert(1, 0) = -2.0;
    a.makeCompressed();
    std::ostringstream out;
    write_matrix_market(out, a);
    EXPECT_EQ(out.str(), "%%MatrixMarket matrix coordinate real general\n2 3 2\n1 3 0.5\n2 1 -2\n");
}

TEST(AtomicWrite, ReplacesContentAndLeavesNoTemporary)
{
    const auto dir = std::filesystem::temp_directory_path() / "oseen_io_test";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    const auto file = dir / "a.txt";
    write_file_atomic(file, "first");
    write_file_atomic(file, "second\n");
    EXPECT_EQ(slurp(file), "second\n");
    int entries = 0;
    for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir)) {
        ++entries;
    }
    EXPECT_EQ(entries, 1);
    std::filesystem::remove_all(dir);
}

TEST(FormatDouble, RoundTrips)
{
    for (const double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0}) {
        EXPECT_EQ(std::stod(format_double(v)), v);
    }
}
