#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "specint/array.hpp"

namespace specint {

struct Node;
using NodePtr = std::shared_ptr<Node>;

/// One record on the tape. A forward pass builds a fresh DAG of Nodes; the
/// graph only lives as long as someone holds the root. `backprop` reads
/// this node's grad and accumulates into the parents' grads, so calling
/// backward() twice without zero_grad() adds up.
struct Node {
  Array value;
  Array grad;                 // same shape as value, zero until backward()
  std::vector<NodePtr> parents;
  std::function<void(const Node& self)> backprop;  // empty for leaves
  bool requires_grad = true;

  explicit Node(Array v, bool rg = true)
      : value(std::move(v)), grad(Array::zeros_like(value)), requires_grad(rg) {}
};

/// Leaf that participates in gradients (parameters are these).
NodePtr leaf(Array v);
/// Leaf excluded from gradient traversal (inputs, fixed tables).
NodePtr constant(Array v);

/// Hook for custom differentiable ops (interpolation lives outside this
/// module, and tests inject deliberately broken rules through it).
NodePtr make_op(Array value, std::vector<NodePtr> parents,
                std::function<void(const Node&)> backprop);

// Elementwise arithmetic. Shapes must match exactly, or the second operand
// may be (a) a rank-0 scalar or (b) one rank lower with a matching trailing
// shape, in which case it broadcasts over the leading batch dimension.
NodePtr add(const NodePtr& a, const NodePtr& b);
NodePtr sub(const NodePtr& a, const NodePtr& b);
NodePtr mul(const NodePtr& a, const NodePtr& b);
NodePtr scale(const NodePtr& a, double c);

NodePtr matmul(const NodePtr& a, const NodePtr& b);  // [m x k] * [k x n]

/// Concatenate along `axis` (0 or 1). Rank-1 inputs concat along axis 0;
/// rank-2 inputs along either axis (remaining dimension must agree).
NodePtr concat(const std::vector<NodePtr>& parts, std::size_t axis);

NodePtr reshape(const NodePtr& a, Shape shape);
NodePtr slice_cols(const NodePtr& a, std::size_t c0, std::size_t c1);  // [m x n] -> [m x (c1-c0)]

NodePtr sum(const NodePtr& a);        // -> scalar
NodePtr mean(const NodePtr& a);       // -> scalar
NodePtr mean_axis0(const NodePtr& a); // [m x n] -> [n]
NodePtr tile_scalar(const NodePtr& s, std::size_t m);  // scalar -> [m]

NodePtr tanh_op(const NodePtr& a);
NodePtr sigmoid(const NodePtr& a);
NodePtr relu(const NodePtr& a);

/// Named activation lookup ("tanh" | "sigmoid" | "relu").
NodePtr activation(const std::string& name, const NodePtr& a);

/// Valid (no padding) cross-correlation of each batch row with `kernel`,
/// plus a scalar bias: signal [batch x L], kernel [K] -> [batch x L'],
/// L' = floor((L-K)/stride) + 1. Gradients flow to all three inputs.
NodePtr conv1d(const NodePtr& signal, const NodePtr& kernel, std::size_t stride,
               const NodePtr& bias);

/// Multi-channel variant for the CNN baseline: signal [Cin x L],
/// kernels [Cout x Cin x K], bias [Cout] -> [Cout x L'].
NodePtr conv1d_multi(const NodePtr& signal, const NodePtr& kernels,
                     std::size_t stride, const NodePtr& bias);

/// Mean over the batch of -log softmax(logits)[label], stabilized by
/// row-max subtraction. logits [batch x C], C >= 2.
NodePtr cross_entropy(const NodePtr& logits, const std::vector<int>& labels);

/// Reverse pass from a scalar loss. Seeds d(loss)/d(loss) = 1 and visits
/// every reachable node exactly once in reverse topological order.
void backward(const NodePtr& loss);

/// Deterministic reverse topological order (children before parents) of the
/// grad-requiring subgraph under `root`. Exposed for tests.
std::vector<Node*> topo_order(const NodePtr& root);

struct Parameter {
  std::string name;
  NodePtr node;
  bool trainable = true;
};

/// Flat named-parameter registry shared by every trainable model.
class ParamRegistry {
 public:
  NodePtr add_param(const std::string& name, Array init);
  std::vector<Parameter>& params() { return params_; }
  const std::vector<Parameter>& params() const { return params_; }
  void zero_grad();

  std::vector<Array> snapshot_values() const;
  void restore_values(const std::vector<Array>& values);

 private:
  std::vector<Parameter> params_;
};

}  // namespace specint
