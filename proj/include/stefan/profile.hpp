#pragma once

#include <Eigen/Core>

namespace stefan {

enum class Phase { Liquid, Solid };

/// Piecewise-linear dimensionless temperature on one phase interval.
///
/// Liquid profiles live on [alpha0, beta0]. Solid profiles are stored on
/// [beta0, eta_max] and take tail_value (= u_c) beyond the last node.
struct Profile {
    Phase kind = Phase::Liquid;
    Eigen::VectorXd nodes;
    Eigen::VectorXd values;
    double tail_value = 0.0;

    Eigen::Index size() const { return nodes.size(); }
    double lo() const { return nodes(0); }
    double hi() const { return nodes(nodes.size() - 1); }
    bool unbounded() const { return kind == Phase::Solid; }
};

inline constexpr int kDefaultGridSize = 513;
/// Stretch of the solid compactifying map; last spacing is (K+1)^2 times the first.
inline constexpr double kSolidStretch = 2.0;

Profile make_liquid_grid(double alpha0, double beta0, int n);
Profile make_solid_grid(double beta0, double u_c, int n, double eta_max);

/// Index k of the panel [nodes(k), nodes(k+1)] containing eta (clamped to the grid).
Eigen::Index locate_panel(const Profile& p, double eta);

double eval(const Profile& p, double eta);

/// max over nodes of |p - q|; grids must coincide.
double sup_distance(const Profile& p, const Profile& q);

/// (1 - w) p + w q on the shared grid.
Profile blend(const Profile& p, const Profile& q, double w);

}  // namespace stefan
