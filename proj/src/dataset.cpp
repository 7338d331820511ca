#include "lfoeq/dataset.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "lfoeq/errors.hpp"
#include "lfoeq/rng.hpp"

namespace lfoeq {

namespace {

constexpr char kMagic[6] = {'L', 'F', 'O', 'E', 'Q', '1'};
constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

// Output writer that hashes every byte after the magic.
class HashingWriter {
 public:
  explicit HashingWriter(std::ostream& out) : out_(out) {}

  void raw(const void* data, std::size_t n) {
    out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
    hash_ = fnv1a64(data, n, hash_);
  }
  void u64(std::uint64_t v) { raw(&v, sizeof(v)); }
  void f64(double v) { raw(&v, sizeof(v)); }
  void doubles(const double* data, std::size_t n) { raw(data, n * sizeof(double)); }
  std::uint64_t hash() const { return hash_; }

 private:
  std::ostream& out_;
  std::uint64_t hash_ = kFnvOffset;
};

class HashingReader {
 public:
  HashingReader(std::istream& in, const std::string& path)
      : in_(in), path_(path) {}

  void raw(void* data, std::size_t n) {
    in_.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
    if (!in_) throw CorruptFile(path_ + ": truncated");
    hash_ = fnv1a64(data, n, hash_);
  }
  std::uint64_t u64() {
    std::uint64_t v = 0;
    raw(&v, sizeof(v));
    return v;
  }
  double f64() {
    double v = 0;
    raw(&v, sizeof(v));
    return v;
  }
  void doubles(double* data, std::size_t n) { raw(data, n * sizeof(double)); }
  std::uint64_t hash() const { return hash_; }

 private:
  std::istream& in_;
  std::string path_;
  std::uint64_t hash_ = kFnvOffset;
};

// row-major views for bit-exact round trips
using RowMajorMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace

std::uint64_t fnv1a64(const void* data, std::size_t n, std::uint64_t hash) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    hash ^= bytes[i];
    hash *= kFnvPrime;
  }
  return hash;
}

void TrajectoryDataset::validate() const {
  if (state_dim <= 0 || horizon <= 0 || action_dim < 0) {
    throw CorruptFile("dataset header has non-positive dimensions");
  }
  for (const auto& traj : trajectories) {
    if (traj.states.rows() != horizon + 1 || traj.states.cols() != state_dim) {
      throw CorruptFile("trajectory state block has wrong shape");
    }
    if (traj.actions.rows() != (action_dim == 0 ? 0 : horizon) ||
        traj.actions.cols() != action_dim) {
      throw CorruptFile("trajectory action block has wrong shape");
    }
    if (!traj.states.allFinite() || !traj.actions.allFinite()) {
      throw CorruptFile("trajectory contains non-finite values");
    }
  }
}

Eigen::MatrixXd TrajectoryDataset::state_action_matrix() const {
  if (stripped()) {
    throw DatasetModeMismatch(
        "state-action view requested on an action-stripped dataset");
  }
  Eigen::MatrixXd x(n_transitions(), state_dim + action_dim);
  Eigen::Index row = 0;
  for (const auto& traj : trajectories) {
    for (int t = 0; t < horizon; ++t, ++row) {
      x.row(row) << traj.states.row(t), traj.actions.row(t);
    }
  }
  return x;
}

Eigen::MatrixXd TrajectoryDataset::state_transition_matrix() const {
  Eigen::MatrixXd x(n_transitions(), 2 * state_dim);
  Eigen::Index row = 0;
  for (const auto& traj : trajectories) {
    for (int t = 0; t < horizon; ++t, ++row) {
      x.row(row) << traj.states.row(t), traj.states.row(t + 1);
    }
  }
  return x;
}

void save_dataset(const TrajectoryDataset& dataset, const std::string& path) {
  dataset.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoFailure("cannot open " + path + " for writing");
  out.write(kMagic, sizeof(kMagic));

  HashingWriter writer(out);
  writer.u64(dataset.env_id.size());
  writer.raw(dataset.env_id.data(), dataset.env_id.size());
  writer.f64(dataset.dt);
  writer.u64(static_cast<std::uint64_t>(dataset.state_dim));
  writer.u64(static_cast<std::uint64_t>(dataset.action_dim));
  writer.u64(static_cast<std::uint64_t>(dataset.trajectories.size()));
  writer.u64(static_cast<std::uint64_t>(dataset.horizon));
  for (const auto& traj : dataset.trajectories) {
    writer.f64(traj.episode_return);
    RowMajorMatrix states = traj.states;
    writer.doubles(states.data(), static_cast<std::size_t>(states.size()));
    if (dataset.action_dim > 0) {
      RowMajorMatrix actions = traj.actions;
      writer.doubles(actions.data(), static_cast<std::size_t>(actions.size()));
    }
  }
  std::uint64_t checksum = writer.hash();
  out.write(reinterpret_cast<const char*>(&checksum), sizeof(checksum));
  if (!out) throw IoFailure("write to " + path + " failed");
}

TrajectoryDataset load_dataset(const std::string& path, DatasetView view,
                               std::optional<int> subsample_n,
                               std::uint64_t seed) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open " + path);
  char magic[6];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(magic)) != 0) {
    throw CorruptFile(path + ": bad magic");
  }

  HashingReader reader(in, path);
  TrajectoryDataset dataset;
  std::uint64_t id_len = reader.u64();
  if (id_len > 256) throw CorruptFile(path + ": absurd env id length");
  dataset.env_id.resize(id_len);
  reader.raw(dataset.env_id.data(), id_len);
  dataset.dt = reader.f64();
  dataset.state_dim = static_cast<int>(reader.u64());
  dataset.action_dim = static_cast<int>(reader.u64());
  std::uint64_t n_traj = reader.u64();
  dataset.horizon = static_cast<int>(reader.u64());
  if (dataset.state_dim <= 0 || dataset.state_dim > 1024 ||
      dataset.action_dim < 0 || dataset.action_dim > 1024 ||
      dataset.horizon <= 0 || dataset.horizon > (1 << 20) || n_traj > (1 << 20)) {
    throw CorruptFile(path + ": implausible header");
  }

  dataset.trajectories.resize(n_traj);
  for (auto& traj : dataset.trajectories) {
    traj.episode_return = reader.f64();
    RowMajorMatrix states(dataset.horizon + 1, dataset.state_dim);
    reader.doubles(states.data(), static_cast<std::size_t>(states.size()));
    traj.states = states;
    if (dataset.action_dim > 0) {
      RowMajorMatrix actions(dataset.horizon, dataset.action_dim);
      reader.doubles(actions.data(), static_cast<std::size_t>(actions.size()));
      traj.actions = actions;
    } else {
      traj.actions.resize(0, 0);
    }
  }
  std::uint64_t stored_checksum = 0;
  std::uint64_t computed = reader.hash();
  in.read(reinterpret_cast<char*>(&stored_checksum), sizeof(stored_checksum));
  if (!in) throw CorruptFile(path + ": missing checksum");
  if (stored_checksum != computed) {
    throw CorruptFile(path + ": checksum mismatch");
  }
  dataset.validate();

  if (subsample_n.has_value()) {
    int n = *subsample_n;
    if (n < 0 || n > dataset.n_trajectories()) {
      std::ostringstream msg;
      msg << "subsample of " << n << " from " << dataset.n_trajectories()
          << " trajectories";
      throw BadSubsample(msg.str());
    }
    std::vector<int> order(dataset.trajectories.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    rng.shuffle(order);
    std::vector<Trajectory> kept;
    kept.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      kept.push_back(std::move(dataset.trajectories[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])]));
    }
    dataset.trajectories = std::move(kept);
  }

  if (view == DatasetView::kLfo && dataset.action_dim > 0) {
    dataset.action_dim = 0;
    for (auto& traj : dataset.trajectories) traj.actions.resize(0, 0);
  }
  return dataset;
}

void export_dataset_csv(const TrajectoryDataset& dataset,
                        const std::string& directory) {
  std::filesystem::create_directories(directory);
  for (std::size_t k = 0; k < dataset.trajectories.size(); ++k) {
    std::ostringstream name;
    name << directory << "/trajectory_" << k << ".csv";
    std::ofstream out(name.str());
    if (!out) throw IoFailure("cannot open " + name.str());
    out.precision(17);
    out << "# env_id=" << dataset.env_id << " dt=" << dataset.dt
        << " episode_return=" << dataset.trajectories[k].episode_return << "\n";
    for (int d = 0; d < dataset.state_dim; ++d) out << "s" << d << ",";
    for (int d = 0; d < dataset.action_dim; ++d) out << "a" << d << ",";
    for (int d = 0; d < dataset.state_dim; ++d) {
      out << "s_next" << d << (d + 1 < dataset.state_dim ? "," : "\n");
    }
    const auto& traj = dataset.trajectories[k];
    for (int t = 0; t < dataset.horizon; ++t) {
      for (int d = 0; d < dataset.state_dim; ++d) out << traj.states(t, d) << ",";
      for (int d = 0; d < dataset.action_dim; ++d) out << traj.actions(t, d) << ",";
      for (int d = 0; d < dataset.state_dim; ++d) {
        out << traj.states(t + 1, d) << (d + 1 < dataset.state_dim ? "," : "\n");
      }
    }
    if (!out) throw IoFailure("write to " + name.str() + " failed");
  }
}

}  // namespace lfoeq
