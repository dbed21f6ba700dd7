#include "oseen/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace oseen {

namespace {

struct RuleEntry {
    double x;
    double y;
    double w;
};

// Fully symmetric interior rules with positive weights, produced by
// tools/scripts/gen_triangle_quadrature.py.
constexpr RuleEntry kDegree1[] = {
    {0.3333333333333333, 0.3333333333333333, 0.5},
};
constexpr RuleEntry kDegree2[] = {
    {0.16666666666666666, 0.16666666666666666, 0.16666666666666666},
    {0.16666666666666666, 0.6666666666666667, 0.16666666666666666},
    {0.6666666666666667, 0.16666666666666666, 0.16666666666666666},
};
constexpr RuleEntry kDegree3[] = {
    {0.13624531882715776, 0.13624531882715776, 0.09482070930570477},
    {0.13624531882715776, 0.7275093623456845, 0.09482070930570477},
    {0.7275093623456845, 0.13624531882715776, 0.09482070930570477},
    {0.448108056055281, 0.448108056055281, 0.07184595736096187},
    {0.448108056055281, 0.10378388788943804, 0.07184595736096187},
    {0.10378388788943804, 0.448108056055281, 0.07184595736096187},
};
constexpr RuleEntry kDegree4[] = {
    {0.09157621350977109, 0.09157621350977109, 0.05497587182766119},
    {0.09157621350977109, 0.8168475729804578, 0.05497587182766119},
    {0.8168475729804578, 0.09157621350977109, 0.05497587182766119},
    {0.4459484909159647, 0.4459484909159647, 0.11169079483900549},
    {0.4459484909159647, 0.10810301816807055, 0.11169079483900549},
    {0.10810301816807055, 0.4459484909159647, 0.11169079483900549},
};
constexpr RuleEntry kDegree5[] = {
    {0.3333333333333333, 0.3333333333333333, 0.11249999999999953},
    {0.47014206410511516, 0.47014206410511516, 0.06619707639425335},
    {0.47014206410511516, 0.05971587178976967, 0.06619707639425335},
    {0.05971587178976967, 0.47014206410511516, 0.06619707639425335},
    {0.10128650732345623, 0.10128650732345623, 0.06296959027241344},
    {0.10128650732345623, 0.7974269853530875, 0.06296959027241344},
    {0.7974269853530875, 0.10128650732345623, 0.06296959027241344},
};
constexpr RuleEntry kDegree6[] = {
    {0.24928674517091456, 0.24928674517091456, 0.05839313786318556},
    {0.24928674517091456, 0.5014265096581709, 0.05839313786318556},
    {0.5014265096581709, 0.24928674517091456, 0.05839313786318556},
    {0.06308901449150088, 0.06308901449150088, 0.025422453185102573},
    {0.06308901449150088, 0.8738219710169982, 0.025422453185102573},
    {0.8738219710169982, 0.06308901449150088, 0.025422453185102573},
    {0.3103524510337806, 0.6365024991213984, 0.04142553780918928},
    {0.053145049844820935, 0.6365024991213984, 0.04142553780918928},
    {0.3103524510337806, 0.053145049844820935, 0.04142553780918928},
    {0.6365024991213984, 0.053145049844820935, 0.04142553780918928},
    {0.053145049844820935, 0.3103524510337806, 0.04142553780918928},
    {0.6365024991213984, 0.3103524510337806, 0.04142553780918928},
};
constexpr RuleEntry kDegree7[] = {
    {0.41352040252775674, 0.41352040252775674, 0.018522689053919714},
    {0.41352040252775674, 0.17295919494448653, 0.018522689053919714},
    {0.17295919494448653, 0.41352040252775674, 0.018522689053919714},
    {0.06442116915560764, 0.06442116915560764, 0.026132030233873307},
    {0.06442116915560764, 0.8711576616887847, 0.026132030233873307},
    {0.8711576616887847, 0.06442116915560764, 0.026132030233873307},
    {0.2329149909747949, 0.2329149909747949, 0.052700127431184796},
    {0.2329149909747949, 0.5341700180504102, 0.052700127431184796},
    {0.5341700180504102, 0.2329149909747949, 0.052700127431184796},
    {0.31239486692378277, 0.04362567435863838, 0.03465590997384441},
    {0.04362567435863838, 0.31239486692378277, 0.03465590997384441},
    {0.6439794587175788, 0.31239486692378277, 0.03465590997384441},
    {0.6439794587175788, 0.04362567435863838, 0.03465590997384441},
    {0.04362567435863838, 0.6439794587175788, 0.03465590997384441},
    {0.31239486692378277, 0.6439794587175788, 0.03465590997384441},
};
constexpr RuleEntry kDegree8[] = {
    {0.3333333333333333, 0.3333333333333333, 0.07215780383890935},
    {0.0505472283170284, 0.0505472283170284, 0.01622924881159674},
    {0.0505472283170284, 0.8989055433659432, 0.01622924881159674},
    {0.8989055433659432, 0.0505472283170284, 0.01622924881159674},
    {0.17056930775178306, 0.17056930775178306, 0.05160868526735352},
    {0.17056930775178306, 0.6588613844964339, 0.05160868526735352},
    {0.6588613844964339, 0.17056930775178306, 0.05160868526735352},
    {0.4592925882927431, 0.4592925882927431, 0.04754581713363298},
    {0.4592925882927431, 0.08141482341451378, 0.04754581713363298},
    {0.08141482341451378, 0.4592925882927431, 0.04754581713363298},
    {0.2631128296345609, 0.7284923929554424, 0.013615157087223485},
    {0.7284923929554424, 0.008394777409996695, 0.013615157087223485},
    {0.7284923929554424, 0.2631128296345609, 0.013615157087223485},
    {0.2631128296345609, 0.008394777409996695, 0.013615157087223485},
    {0.008394777409996695, 0.7284923929554424, 0.013615157087223485},
    {0.008394777409996695, 0.2631128296345609, 0.013615157087223485},
};
constexpr RuleEntry kDegree9[] = {
    {0.3333333333333333, 0.3333333333333333, 0.04856789814076008},
    {0.18820353561879252, 0.18820353561879252, 0.03982386946359307},
    {0.18820353561879252, 0.6235929287624149, 0.03982386946359307},
    {0.6235929287624149, 0.18820353561879252, 0.03982386946359307},
    {0.43708959149204796, 0.43708959149204796, 0.03891377050216242},
    {0.43708959149204796, 0.12582081701590409, 0.03891377050216242},
    {0.12582081701590409, 0.43708959149204796, 0.03891377050216242},
    {0.044729513394473654, 0.044729513394473654, 0.01278883782936101},
    {0.044729513394473654, 0.9105409732110527, 0.01278883782936101},
    {0.9105409732110527, 0.044729513394473654, 0.01278883782936101},
    {0.48968251919815925, 0.48968251919815925, 0.015667350114093134},
    {0.48968251919815925, 0.0206349616036815, 0.015667350114093134},
    {0.0206349616036815, 0.48968251919815925, 0.015667350114093134},
    {0.7411985987844728, 0.03683841205463924, 0.02164176968860184},
    {0.7411985987844728, 0.22196298916088797, 0.02164176968860184},
    {0.22196298916088797, 0.03683841205463924, 0.02164176968860184},
    {0.22196298916088797, 0.7411985987844728, 0.02164176968860184},
    {0.03683841205463924, 0.22196298916088797, 0.02164176968860184},
    {0.03683841205463924, 0.7411985987844728, 0.02164176968860184},
};

template <std::size_t N>
QuadratureRule make_rule(int degree, const RuleEntry (&table)[N])
{
    QuadratureRule rule;
    rule.degree = degree;
    rule.points.reserve(N);
    rule.weights.reserve(N);
    for (const auto& e : table) {
        rule.points.emplace_back(e.x, e.y);
        rule.weights.push_back(e.w);
    }
    return rule;
}

// Collapsed (Duffy) product of n-point Gauss-Legendre rules; exact to
// degree 2n - 2 on the triangle.
QuadratureRule collapsed_gauss(int degree, int n)
{
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) {
        const double b = i / std::sqrt(4.0 * i * i - 1.0);
        jacobi(i, i - 1) = b;
        jacobi(i - 1, i) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
    Eigen::VectorXd nodes(n);
    Eigen::VectorXd weights(n);
    for (int i = 0; i < n; ++i) {
        nodes(i) = 0.5 * (eig.eigenvalues()(i) + 1.0);
        const double v = eig.eigenvectors()(0, i);
        weights(i) = v * v;
    }
    QuadratureRule rule;
    rule.degree = degree;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double s = nodes(i);
            const double t = nodes(j);
            rule.points.emplace_back(s * (1.0 - t), t);
            rule.weights.push_back(weights(i) * weights(j) * (1.0 - t));
        }
    }
    return rule;
}

std::array<QuadratureRule, kMaxQuadratureDegree> build_rules()
{
    return {make_rule(1, kDegree1), make_rule(2, kDegree2), make_rule(3, kDegree3),
            make_rule(4, kDegree4), make_rule(5, kDegree5), make_rule(6, kDegree6),
            make_rule(7, kDegree7), make_rule(8, kDegree8), make_rule(9, kDegree9),
            collapsed_gauss(10, 6)};
}

} // namespace

const QuadratureRule& quadrature_rule(int exactness)
{
    if (exactness < 1 || exactness > kMaxQuadratureDegree) {
        throw std::invalid_argument("quadrature_rule: exactness " + std::to_string(exactness) +
                                    " outside 1.." + std::to_string(kMaxQuadratureDegree));
    }
    static const auto rules = build_rules();
    return rules[static_cast<std::size_t>(exactness - 1)];
}

} // namespace oseen
