#pragma once

#include <Eigen/Dense>
#include <vector>

namespace bems::autodiff {

using Mat = Eigen::MatrixXd;

// Reverse-mode differentiation over a Wengert list of matrix-valued nodes.
// The primitive set is closed: affine maps, rectify, tanh, exp, log,
// square, elementwise arithmetic/min/clamp, column slicing/concatenation
// and sum/mean reductions — everything the squashed-Gaussian actor-critic
// losses are composed of. Creation order is execution order, so backward
// is a single reverse sweep. Shapes are checked at construction; a
// mismatch throws UsageError. Gradients are only computed for nodes on a
// path from a requires-grad input to the loss.
class Tape {
 public:
  int input(const Mat& value, bool requires_grad = false);

  // y = x * w, plus row-broadcast bias (bias is 1 x out).
  int affine(int x, int w, int bias);

  int relu(int x);
  int tanh(int x);
  int exp(int x);
  int log(int x);
  int square(int x);

  int add(int a, int b);
  int sub(int a, int b);
  int mul(int a, int b);
  int div(int a, int b);
  int min(int a, int b);  // ties route the gradient to the first argument

  int add_scalar(int a, double s);
  int mul_scalar(int a, double s);
  int clamp(int a, double lo, double hi);  // zero gradient outside (lo, hi)

  int slice_cols(int a, int start, int count);
  int concat_cols(int a, int b);

  int row_sum(int a);   // [N x M] -> [N x 1]
  int sum_all(int a);   // -> [1 x 1]
  int mean_all(int a);  // -> [1 x 1]

  // Seeds the scalar loss with gradient 1 and sweeps the list in reverse.
  void backward(int loss);

  const Mat& value(int id) const { return nodes_[check(id)].val; }
  // Valid after backward(); zero for nodes the loss does not reach.
  Mat gradient(int id) const;
  bool requires_grad(int id) const { return nodes_[check(id)].req; }
  std::size_t size() const { return nodes_.size(); }

 private:
  enum class Op {
    kInput, kAffine, kRelu, kTanh, kExp, kLog, kSquare,
    kAdd, kSub, kMul, kDiv, kMin, kAddScalar, kMulScalar, kClamp,
    kSliceCols, kConcatCols, kRowSum, kSumAll, kMeanAll,
  };

  struct Node {
    Op op;
    Mat val;
    Mat grad;  // allocated on first touch during backward
    bool req = false;
    bool seeded = false;
    int a = -1, b = -1, c = -1;
    double s0 = 0.0, s1 = 0.0;
    int i0 = 0, i1 = 0;
  };

  int check(int id) const;
  int push(Node n);
  Mat& grad_ref(int id);
  void accumulate(int id, const Mat& g);

  std::vector<Node> nodes_;
};

}  // namespace bems::autodiff
