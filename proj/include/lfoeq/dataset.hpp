#ifndef LFOEQ_DATASET_HPP_
#define LFOEQ_DATASET_HPP_

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace lfoeq {

// Fixed-length episode. states has horizon+1 rows so that step t is the
// tuple (states.row(t), actions.row(t), states.row(t+1)); the chaining
// invariant holds by construction. episode_return is true-reward metadata.
struct Trajectory {
  Eigen::MatrixXd states;   // (horizon+1) x state_dim
  Eigen::MatrixXd actions;  // horizon x action_dim; zero columns when stripped
  double episode_return = 0.0;
};

enum class DatasetView { kLfd, kLfo };

// Expert rollouts in either the demonstration view (with actions) or the
// observation view (action_dim == 0).
//
// On-disk layout (all integers little-endian u64, all floats f64):
//   magic "LFOEQ1" | env_id_len, env_id bytes | dt | state_dim | action_dim |
//   n_trajectories | horizon | per trajectory: episode_return,
//   states row-major (horizon+1) x state_dim, actions row-major
//   horizon x action_dim | fnv1a-64 checksum of every byte after the magic.
struct TrajectoryDataset {
  std::string env_id;
  double dt = 0.0;
  int state_dim = 0;
  int action_dim = 0;  // 0 marks the stripped (LfO) view
  int horizon = 0;
  std::vector<Trajectory> trajectories;

  int n_trajectories() const { return static_cast<int>(trajectories.size()); }
  std::int64_t n_transitions() const {
    return static_cast<std::int64_t>(trajectories.size()) * horizon;
  }
  bool stripped() const { return action_dim == 0; }

  void validate() const;

  // flattened discriminator inputs over all transitions
  Eigen::MatrixXd state_action_matrix() const;  // throws on stripped datasets
  Eigen::MatrixXd state_transition_matrix() const;
};

void save_dataset(const TrajectoryDataset& dataset, const std::string& path);

TrajectoryDataset load_dataset(const std::string& path, DatasetView view,
                               std::optional<int> subsample_n = std::nullopt,
                               std::uint64_t seed = 0);

// companion plain-text export, one CSV per trajectory in a directory
void export_dataset_csv(const TrajectoryDataset& dataset,
                        const std::string& directory);

std::uint64_t fnv1a64(const void* data, std::size_t n, std::uint64_t seed_hash);

}  // namespace lfoeq

#endif  // LFOEQ_DATASET_HPP_
