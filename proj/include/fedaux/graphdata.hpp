#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fedaux/numerics.hpp"

namespace fedaux {

// Undirected graph with node features and integer labels. Edges are stored
// normalized: u < v, lexicographically sorted, no duplicates, no self-loops.
struct Graph {
  int n = 0;
  int num_classes = 0;
  std::vector<std::pair<int, int>> edges;
  Matrix features;          // n x d
  std::vector<int> labels;  // values in [0, num_classes)

  // Normalizes edge storage and checks all invariants; throws on violation.
  // Duplicate edges and self-loops coming from files are dropped with a warning.
  void validate_and_normalize();

  std::vector<std::vector<int>> adjacency_list() const;
};

struct Partition {
  int num_clients = 0;
  std::vector<int> assignment;  // node -> client, values in [0, num_clients)
};

struct ClientSubgraph {
  int client_id = 0;
  std::vector<int> node_ids;  // global ids, ascending
  Graph local;                // reindexed; cross-client edges dropped
  std::vector<uint8_t> train_mask, val_mask, test_mask;
};

// Planted-partition generator: equal-size blocks, blocks grouped into
// super-clusters with increasing intra-block density, uniform inter-block
// density, labels tied to the super-cluster with fixed fidelity, one-hot
// features. Returns the graph plus the block partition (blocks act as clients).
struct SbmConfig {
  int nodes = 3000;
  int blocks = 20;
  int blocks_per_group = 4;
  double p_inter = 0.02;
  double p_intra_step = 0.15;  // group g (0-based) gets density (g + 1) * step
  int num_labels = 5;
  double label_fidelity = 0.8;

  int groups() const { return blocks_per_group > 0 ? blocks / blocks_per_group : 0; }
  void validate() const;
};

std::pair<Graph, Partition> gen_sbm(const SbmConfig& cfg, Rng& rng);

// Seeded balanced region growing: K BFS seeds chosen by farthest-first
// traversal, greedy growth by connectivity gain under a (1 + 0.05) * n / K
// size cap, then one boundary-refinement sweep that moves nodes reducing the
// edge cut. Deterministic given the rng seed.
Partition partition_graph(const Graph& g, int k, Rng& rng);

std::vector<ClientSubgraph> build_subgraphs(const Graph& g, const Partition& p);

// Random train/val/test split per client. Ratios must be >= 0 and sum to 1.
// Clients with fewer than 3 nodes put everything in train and warn.
ClientSubgraph split(const ClientSubgraph& sub, const std::array<double, 3>& ratios, Rng& rng);

Graph load_graph(const std::string& path);
void save_graph(const Graph& g, const std::string& path);
Partition load_partition(const std::string& path, int expected_nodes);
void save_partition(const Partition& p, const std::string& path);

}  // namespace fedaux
