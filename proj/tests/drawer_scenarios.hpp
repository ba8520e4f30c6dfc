#pragma once

// Scenario configs shared by the drawer tests and the acceptance runner.
// Mirrors the files under scenarios/ in the repo root.

#include <string>

#include "aicon/drawer/sim.hpp"

namespace aicon::drawer::testcfg {

inline std::string world_block(double py = 0.0, double pz = 0.0) {
  return "[world]\n"
         "p = [0.8, " +
         std::to_string(py) + ", " + std::to_string(pz) +
         "]\n"
         "phi = 3.14159265358979\n"
         "theta = 1.5707963267949\n"
         "q_max = 0.35\n";
}

// Truth equals the prior, tight handle covariance: the certainty chain must
// stay quiet and the run should go approach, grasp, open.
inline std::string nominal() {
  return world_block() +
         "[robot]\n"
         "ee_t = [0.0, 0.0, 0.0]\n"
         "hand = 1.0\n"
         "[prior]\n"
         "drawer = [0.8, 0.0, 0.0]\n"
         "drawer_var = 2e-5\n";
}

// Handle offset from the prior by more than 3 cm, wide prior, sensors three
// times as noisy. Demands an information-gathering phase.
inline std::string uncertain() {
  return world_block(0.05, 0.02) +
         "[robot]\n"
         "ee_t = [0.0, 0.0, 0.0]\n"
         "hand = 1.0\n"
         "[noise]\n"
         "bearing_sigma = 0.03\n"
         "odom_sigma = 0.003\n"
         "ft_sigma = 0.3\n"
         "hand_sigma = 0.03\n"
         // The filters are told the tripled noise floors; otherwise the
         // handle covariance collapses around a biased depth.
         "[network]\n"
         "r_bearing = 2e-3\n"
         "q_drawer = 1e-7\n"
         "r_ee = 9e-6\n"
         "r_hand = 9e-4\n"
         "[prior]\n"
         "drawer = [0.8, 0.0, 0.0]\n"
         "drawer_var = 2.5e-3\n";
}

// Nominal setup with the drawer stripped from the hand mid-opening.
inline std::string strip(int tick) {
  return nominal() + "[disturbance]\ne1 = \"" + std::to_string(tick) +
         " strip_from_hand\"\n";
}

// Three initial configurations for the ablation sweep: moderate prior so the
// gates actually matter, EE started from different offsets.
inline std::string ablation(int which) {
  const char* starts[3] = {"[robot]\nee_t = [0.0, 0.0, 0.0]\n",
                           "[robot]\nee_t = [-0.1, 0.15, 0.0]\n",
                           "[robot]\nee_t = [0.05, -0.1, 0.1]\n"};
  return world_block(0.02, 0.0) + starts[which] +
         "[prior]\n"
         "drawer = [0.8, 0.0, 0.0]\n"
         "drawer_var = 4e-4\n";
}

inline Scenario make(const std::string& text) {
  return Scenario::from_config(Config::from_string(text));
}

}  // namespace aicon::drawer::testcfg
