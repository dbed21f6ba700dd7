#include "oseen/reference_element.hpp"

#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>

namespace oseen {

namespace {

void check_degree(int degree)
{
    if (degree < 1 || degree > 3) {
        throw std::invalid_argument("unsupported element degree " + std::to_string(degree) +
                                    " (expected 1, 2 or 3)");
    }
}

} // namespace

RefElement::RefElement(int degree) : degree_(degree)
{
    check_degree(degree);

    // Barycentric coordinates as affine functions of the reference point.
    const std::array<AffineFactor, 3> lambda{
        AffineFactor{Vec2(-1.0, -1.0), 1.0},
        AffineFactor{Vec2(1.0, 0.0), 0.0},
        AffineFactor{Vec2(0.0, 1.0), 0.0},
    };
    const std::array<Vec2, 3> vertex{Vec2(0.0, 0.0), Vec2(1.0, 0.0), Vec2(0.0, 1.0)};
    const std::array<std::array<int, 2>, 3> edge{{{0, 1}, {1, 2}, {2, 0}}};

    // c * lambda_a - d
    auto scaled = [&lambda](int a, double c, double d) {
        return AffineFactor{c * lambda[a].slope, c * lambda[a].offset - d};
    };

    for (int a = 0; a < 3; ++a) {
        nodes_.push_back(vertex[a]);
        switch (degree) {
        case 1:
            basis_.push_back({1.0, {lambda[a]}});
            break;
        case 2:
            basis_.push_back({1.0, {lambda[a], scaled(a, 2.0, 1.0)}});
            break;
        default:
            basis_.push_back({0.5, {lambda[a], scaled(a, 3.0, 1.0), scaled(a, 3.0, 2.0)}});
            break;
        }
    }
    for (const auto& [a, b] : edge) {
        if (degree == 2) {
            nodes_.push_back(0.5 * (vertex[a] + vertex[b]));
            basis_.push_back({4.0, {lambda[a], lambda[b]}});
        } else if (degree == 3) {
            nodes_.push_back((2.0 * vertex[a] + vertex[b]) / 3.0);
            basis_.push_back({4.5, {lambda[a], lambda[b], scaled(a, 3.0, 1.0)}});
            nodes_.push_back((vertex[a] + 2.0 * vertex[b]) / 3.0);
            basis_.push_back({4.5, {lambda[a], lambda[b], scaled(b, 3.0, 1.0)}});
        }
    }
    if (degree == 3) {
        nodes_.push_back(Vec2(1.0 / 3.0, 1.0 / 3.0));
        basis_.push_back({27.0, {lambda[0], lambda[1], lambda[2]}});
    }
}

const RefElement& RefElement::get(int degree)
{
    check_degree(degree);
    static const std::array<RefElement, 3> elements{RefElement(1), RefElement(2), RefElement(3)};
    return elements[static_cast<std::size_t>(degree - 1)];
}

double RefElement::value(int i, const Vec2& xi) const
{
    const auto& b = basis_[static_cast<std::size_t>(i)];
    double v = b.scale;
    for (const auto& f : b.factors) {
        v *= f.at(xi);
    }
    return v;
}

Vec2 RefElement::gradient(int i, const Vec2& xi) const
{
    const auto& b = basis_[static_cast<std::size_t>(i)];
    const std::size_t n = b.factors.size();
    Vec2 g = Vec2::Zero();
    for (std::size_t m = 0; m < n; ++m) {
        double rest = b.scale;
        for (std::size_t l = 0; l < n; ++l) {
            if (l != m) {
                rest *= b.factors[l].at(xi);
            }
        }
        g += rest * b.factors[m].slope;
    }
    return g;
}

Mat2 RefElement::hessian(int i, const Vec2& xi) const
{
    const auto& b = basis_[static_cast<std::size_t>(i)];
    const std::size_t n = b.factors.size();
    Mat2 h = Mat2::Zero();
    for (std::size_t m = 0; m < n; ++m) {
        for (std::size_t p = 0; p < n; ++p) {
            if (p == m) {
                continue;
            }
            double rest = b.scale;
            for (std::size_t l = 0; l < n; ++l) {
                if (l != m && l != p) {
                    rest *= b.factors[l].at(xi);
                }
            }
            h += rest * b.factors[m].slope * b.factors[p].slope.transpose();
        }
    }
    return h;
}

BasisTables RefElement::tabulate(const std::vector<Vec2>& points) const
{
    BasisTables t;
    t.degree = degree_;
    t.num_nodes = num_nodes();
    t.num_points = static_cast<int>(points.size());
    const std::size_t total = points.size() * nodes_.size();
    t.values.reserve(total);
    t.gradients.reserve(total);
    t.hessians.reserve(total);
    for (const auto& xi : points) {
        for (int i = 0; i < num_nodes(); ++i) {
            t.values.push_back(value(i, xi));
            t.gradients.push_back(gradient(i, xi));
            t.hessians.push_back(hessian(i, xi));
        }
    }
    return t;
}

BasisTables reference_basis(int degree, const std::vector<Vec2>& points)
{
    return RefElement::get(degree).tabulate(points);
}

const BasisTables& quadrature_tables(int degree, int exactness)
{
    static std::mutex mutex;
    static std::map<std::pair<int, int>, std::unique_ptr<BasisTables>> cache;
    const QuadratureRule& rule = quadrature_rule(exactness);
    const RefElement& element = RefElement::get(degree);
    std::lock_guard lock(mutex);
    auto& slot = cache[{degree, exactness}];
    if (!slot) {
        slot = std::make_unique<BasisTables>(element.tabulate(rule.points));
    }
    return *slot;
}

} // namespace oseen
