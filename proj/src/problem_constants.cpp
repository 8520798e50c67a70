#include "bagbound/problem_constants.hpp"

#include "bagbound/rng.hpp"

namespace bagbound::constants {

Eigen::MatrixXd generate_covariance(Eigen::Index d, std::uint64_t seed) {
  RngStream rng(seed, {static_cast<std::uint64_t>(d)});
  Eigen::MatrixXd g(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) g(i, j) = rng.normal();
  }
  Eigen::MatrixXd s = g * g.transpose() / static_cast<double>(d);
  s.diagonal().array() += 0.1;
  return s;
}

Eigen::MatrixXd portfolio_sigma() {
  Eigen::MatrixXd s(5, 5);
  s << 0.8792189596078323, 0.12030890103411725, -0.5435051194142364, 0.1400108110296502, -0.3473531245631317,
      0.12030890103411725, 1.1242368670077159, -0.4856410111055431, 0.32923886496761867, 0.21986885050992275,
      -0.5435051194142364, -0.4856410111055431, 3.8778524881119454, -0.06284762534933504, -0.43916110457628366,
      0.1400108110296502, 0.32923886496761867, -0.06284762534933504, 0.38448105820208145, 0.13919939300496387,
      -0.3473531245631317, 0.21986885050992275, -0.43916110457628366, 0.13919939300496387, 0.5724692120436512;
  return s;
}

Eigen::MatrixXd item_selection_sigma() {
  Eigen::MatrixXd s(10, 10);
  s << 0.980405802993657, -0.1678187642127295, 0.30815595821939923, 0.13491032663238373, 0.24223885794060956, 0.1243856771537258, -0.4502307865759703, 0.5294128529145998, -0.030555148402559705, -0.16905997534349088,
      -0.1678187642127295, 0.777070969101259, 0.00511446837000529, 0.2059156352286366, -0.0015934581193097152, 0.2118480498663779, 0.09372898111459287, -0.11178830487526403, 0.07027323551797035, 0.14122932000751787,
      0.30815595821939923, 0.00511446837000529, 0.9144855002647716, -0.12439184905971241, -0.4015645294998258, -0.3815075289948541, 0.10661136222871197, 0.2444697035828677, 0.39507922963745296, 0.05475287224907512,
      0.13491032663238373, 0.2059156352286366, -0.12439184905971241, 0.7142271082340265, 0.22651454331492923, 0.025200363270171854, -0.2072312634666571, 0.0302203982922501, -0.14296392452995602, -0.08811298955308018,
      0.24223885794060956, -0.0015934581193097152, -0.4015645294998258, 0.22651454331492923, 2.0674129830391714, 0.4102610422774548, -0.7611002782886429, -0.15273658291534423, -0.7646971314679936, 0.27860062618096487,
      0.1243856771537258, 0.2118480498663779, -0.3815075289948541, 0.025200363270171854, 0.4102610422774548, 1.4832981146659483, 0.035882058012786155, -0.12624994714019205, -0.04677775109931574, -0.12492076323709504,
      -0.4502307865759703, 0.09372898111459287, 0.10661136222871197, -0.2072312634666571, -0.7611002782886429, 0.035882058012786155, 1.117985093468631, -0.2471023942411156, 0.32588360377232006, 0.1460637014682681,
      0.5294128529145998, -0.11178830487526403, 0.2444697035828677, 0.0302203982922501, -0.15273658291534423, -0.12624994714019205, -0.2471023942411156, 0.6625409432879833, 0.02525158683243086, 0.09574592302408994,
      -0.030555148402559695, 0.07027323551797034, 0.39507922963745296, -0.142963924529956, -0.7646971314679933, -0.04677775109931572, 0.32588360377232023, 0.02525158683243085, 1.2481953150337082, 0.27057900170527227,
      -0.16905997534349088, 0.1412293200075179, 0.05475287224907514, -0.08811298955308018, 0.27860062618096476, -0.12492076323709514, 0.14606370146826814, 0.09574592302408994, 0.27057900170527227, 0.9246314253209365;
  return s;
}

Eigen::VectorXd portfolio_mu() {
  Eigen::VectorXd mu(5);
  mu << 1.0, 2.0, 3.0, 4.0, 5.0;
  return mu;
}

// Produced by tools/derive_portfolio_truth.py.
double portfolio_true_optimum() { return -3.4756863607047515; }

Eigen::VectorXd portfolio_true_solution() {
  Eigen::VectorXd x(6);
  x << -3.7358195038887825, 0.0, 0.0, 0.05757149553592147, 0.12505391447364583, 0.8173745899904327;
  return x;
}

Eigen::VectorXd item_selection_mu() {
  Eigen::VectorXd mu(10);
  for (int i = 0; i < 10; ++i) mu(i) = (-9.0 + 2.0 * i) / 9.0;
  return mu;
}

Eigen::MatrixXd item_selection_a() {
  Eigen::MatrixXd a(2, 10);
  a.row(0).setConstant(-1.0);
  a.row(1) << 0, 0, 0, 0, 0, 0, 1, 1, 1, 1;
  return a;
}

Eigen::VectorXd item_selection_b() {
  Eigen::VectorXd b(2);
  b << -1.0, 2.0;
  return b;
}

}  // namespace bagbound::constants
