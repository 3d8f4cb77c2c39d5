#include "bems/autodiff.hpp"

#include <string>

#include "bems/errors.hpp"

namespace bems::autodiff {

namespace {
void same_shape(const Mat& a, const Mat& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw UsageError(std::string(op) + ": shape mismatch (" +
                     std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                     " vs " + std::to_string(b.rows()) + "x" +
                     std::to_string(b.cols()) + ")");
  }
}
}  // namespace

int Tape::check(int id) const {
  if (id < 0 || id >= static_cast<int>(nodes_.size())) {
    throw UsageError("invalid tape node id " + std::to_string(id));
  }
  return id;
}

int Tape::push(Node n) {
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

int Tape::input(const Mat& value, bool requires_grad) {
  Node n;
  n.op = Op::kInput;
  n.val = value;
  n.req = requires_grad;
  return push(std::move(n));
}

int Tape::affine(int x, int w, int bias) {
  const Mat& xv = nodes_[check(x)].val;
  const Mat& wv = nodes_[check(w)].val;
  const Mat& bv = nodes_[check(bias)].val;
  if (xv.cols() != wv.rows()) throw UsageError("affine: inner dims disagree");
  if (bv.rows() != 1 || bv.cols() != wv.cols()) {
    throw UsageError("affine: bias must be 1 x out");
  }
  Node n;
  n.op = Op::kAffine;
  n.a = x;
  n.b = w;
  n.c = bias;
  n.req = nodes_[x].req || nodes_[w].req || nodes_[bias].req;
  n.val.noalias() = xv * wv;
  n.val.rowwise() += bv.row(0);
  return push(std::move(n));
}

#define BEMS_UNARY(NAME, OP, EXPR)                      \
  int Tape::NAME(int x) {                               \
    const Mat& xv = nodes_[check(x)].val;               \
    Node n;                                             \
    n.op = OP;                                          \
    n.a = x;                                            \
    n.req = nodes_[x].req;                              \
    n.val = (EXPR).matrix();                            \
    return push(std::move(n));                          \
  }

BEMS_UNARY(relu, Op::kRelu, xv.array().max(0.0))
BEMS_UNARY(tanh, Op::kTanh, xv.array().tanh())
BEMS_UNARY(exp, Op::kExp, xv.array().exp())
BEMS_UNARY(log, Op::kLog, xv.array().log())
BEMS_UNARY(square, Op::kSquare, xv.array().square())
#undef BEMS_UNARY

#define BEMS_BINARY(NAME, OP, EXPR)                     \
  int Tape::NAME(int a, int b) {                        \
    const Mat& av = nodes_[check(a)].val;               \
    const Mat& bv = nodes_[check(b)].val;               \
    same_shape(av, bv, #NAME);                          \
    Node n;                                             \
    n.op = OP;                                          \
    n.a = a;                                            \
    n.b = b;                                            \
    n.req = nodes_[a].req || nodes_[b].req;             \
    n.val = (EXPR).matrix();                            \
    return push(std::move(n));                          \
  }

BEMS_BINARY(add, Op::kAdd, av.array() + bv.array())
BEMS_BINARY(sub, Op::kSub, av.array() - bv.array())
BEMS_BINARY(mul, Op::kMul, av.array() * bv.array())
BEMS_BINARY(div, Op::kDiv, av.array() / bv.array())
BEMS_BINARY(min, Op::kMin, av.array().min(bv.array()))
#undef BEMS_BINARY

int Tape::add_scalar(int a, double s) {
  Node n;
  n.op = Op::kAddScalar;
  n.a = check(a);
  n.req = nodes_[a].req;
  n.s0 = s;
  n.val = (nodes_[a].val.array() + s).matrix();
  return push(std::move(n));
}

int Tape::mul_scalar(int a, double s) {
  Node n;
  n.op = Op::kMulScalar;
  n.a = check(a);
  n.req = nodes_[a].req;
  n.s0 = s;
  n.val = nodes_[a].val * s;
  return push(std::move(n));
}

int Tape::clamp(int a, double lo, double hi) {
  if (!(lo < hi)) throw UsageError("clamp: lo must be < hi");
  Node n;
  n.op = Op::kClamp;
  n.a = check(a);
  n.req = nodes_[a].req;
  n.s0 = lo;
  n.s1 = hi;
  n.val = nodes_[a].val.array().max(lo).min(hi).matrix();
  return push(std::move(n));
}

int Tape::slice_cols(int a, int start, int count) {
  const Mat& av = nodes_[check(a)].val;
  if (start < 0 || count <= 0 || start + count > av.cols()) {
    throw UsageError("slice_cols: range out of bounds");
  }
  Node n;
  n.op = Op::kSliceCols;
  n.a = a;
  n.req = nodes_[a].req;
  n.i0 = start;
  n.i1 = count;
  n.val = av.middleCols(start, count);
  return push(std::move(n));
}

int Tape::concat_cols(int a, int b) {
  const Mat& av = nodes_[check(a)].val;
  const Mat& bv = nodes_[check(b)].val;
  if (av.rows() != bv.rows()) throw UsageError("concat_cols: row mismatch");
  Node n;
  n.op = Op::kConcatCols;
  n.a = a;
  n.b = b;
  n.req = nodes_[a].req || nodes_[b].req;
  n.val.resize(av.rows(), av.cols() + bv.cols());
  n.val.leftCols(av.cols()) = av;
  n.val.rightCols(bv.cols()) = bv;
  return push(std::move(n));
}

int Tape::row_sum(int a) {
  Node n;
  n.op = Op::kRowSum;
  n.a = check(a);
  n.req = nodes_[a].req;
  n.val = nodes_[a].val.rowwise().sum();
  return push(std::move(n));
}

int Tape::sum_all(int a) {
  Node n;
  n.op = Op::kSumAll;
  n.a = check(a);
  n.req = nodes_[a].req;
  n.val = Mat::Constant(1, 1, nodes_[a].val.sum());
  return push(std::move(n));
}

int Tape::mean_all(int a) {
  Node n;
  n.op = Op::kMeanAll;
  n.a = check(a);
  n.req = nodes_[a].req;
  n.val = Mat::Constant(1, 1, nodes_[a].val.mean());
  return push(std::move(n));
}

Mat& Tape::grad_ref(int id) {
  Node& n = nodes_[id];
  if (!n.seeded) {
    n.grad = Mat::Zero(n.val.rows(), n.val.cols());
    n.seeded = true;
  }
  return n.grad;
}

void Tape::accumulate(int id, const Mat& g) {
  if (!nodes_[id].req) return;
  grad_ref(id) += g;
}

Mat Tape::gradient(int id) const {
  const Node& n = nodes_[check(id)];
  if (!n.seeded) return Mat::Zero(n.val.rows(), n.val.cols());
  return n.grad;
}

void Tape::backward(int loss) {
  const Node& ln = nodes_[check(loss)];
  if (ln.val.rows() != 1 || ln.val.cols() != 1) {
    throw UsageError("backward: loss must be scalar (1x1)");
  }
  if (!ln.req) return;  // constant loss: every gradient stays zero
  grad_ref(loss) = Mat::Constant(1, 1, 1.0);

  for (int i = loss; i >= 0; --i) {
    Node& n = nodes_[i];
    if (!n.req || !n.seeded) continue;
    const Mat& g = n.grad;
    switch (n.op) {
      case Op::kInput:
        break;
      case Op::kAffine: {
        const Mat& xv = nodes_[n.a].val;
        const Mat& wv = nodes_[n.b].val;
        if (nodes_[n.a].req) grad_ref(n.a).noalias() += g * wv.transpose();
        if (nodes_[n.b].req) grad_ref(n.b).noalias() += xv.transpose() * g;
        if (nodes_[n.c].req) grad_ref(n.c) += g.colwise().sum();
        break;
      }
      case Op::kRelu:
        accumulate(n.a, (g.array() *
                         (nodes_[n.a].val.array() > 0.0).cast<double>())
                            .matrix());
        break;
      case Op::kTanh:
        accumulate(n.a, (g.array() * (1.0 - n.val.array().square())).matrix());
        break;
      case Op::kExp:
        accumulate(n.a, (g.array() * n.val.array()).matrix());
        break;
      case Op::kLog:
        accumulate(n.a, (g.array() / nodes_[n.a].val.array()).matrix());
        break;
      case Op::kSquare:
        accumulate(n.a, (g.array() * 2.0 * nodes_[n.a].val.array()).matrix());
        break;
      case Op::kAdd:
        accumulate(n.a, g);
        accumulate(n.b, g);
        break;
      case Op::kSub:
        accumulate(n.a, g);
        accumulate(n.b, -g);
        break;
      case Op::kMul:
        accumulate(n.a, (g.array() * nodes_[n.b].val.array()).matrix());
        accumulate(n.b, (g.array() * nodes_[n.a].val.array()).matrix());
        break;
      case Op::kDiv: {
        const auto& av = nodes_[n.a].val.array();
        const auto& bv = nodes_[n.b].val.array();
        accumulate(n.a, (g.array() / bv).matrix());
        accumulate(n.b, (-g.array() * av / bv.square()).matrix());
        break;
      }
      case Op::kMin: {
        const auto mask =
            (nodes_[n.a].val.array() <= nodes_[n.b].val.array()).cast<double>();
        accumulate(n.a, (g.array() * mask).matrix());
        accumulate(n.b, (g.array() * (1.0 - mask)).matrix());
        break;
      }
      case Op::kAddScalar:
        accumulate(n.a, g);
        break;
      case Op::kMulScalar:
        accumulate(n.a, g * n.s0);
        break;
      case Op::kClamp: {
        const auto& av = nodes_[n.a].val.array();
        const auto mask =
            ((av > n.s0) && (av < n.s1)).cast<double>();
        accumulate(n.a, (g.array() * mask).matrix());
        break;
      }
      case Op::kSliceCols:
        if (nodes_[n.a].req) grad_ref(n.a).middleCols(n.i0, n.i1) += g;
        break;
      case Op::kConcatCols: {
        const int ca = static_cast<int>(nodes_[n.a].val.cols());
        const int cb = static_cast<int>(nodes_[n.b].val.cols());
        if (nodes_[n.a].req) grad_ref(n.a) += g.leftCols(ca);
        if (nodes_[n.b].req) grad_ref(n.b) += g.rightCols(cb);
        break;
      }
      case Op::kRowSum:
        accumulate(n.a, g.replicate(1, nodes_[n.a].val.cols()));
        break;
      case Op::kSumAll:
        accumulate(n.a, Mat::Constant(nodes_[n.a].val.rows(),
                                      nodes_[n.a].val.cols(), g(0, 0)));
        break;
      case Op::kMeanAll:
        accumulate(n.a,
                   Mat::Constant(nodes_[n.a].val.rows(), nodes_[n.a].val.cols(),
                                 g(0, 0) / static_cast<double>(
                                               nodes_[n.a].val.size())));
        break;
    }
  }
}

}  // namespace bems::autodiff
