#include <gtest/gtest.h>

#include "slca/errors.hpp"
#include "slca/optimizer.hpp"

namespace slca {
namespace {

OptimizerConfig plain(double lr_rep, double lr_cls, double momentum) {
  OptimizerConfig c;
  c.lr_rep = lr_rep;
  c.lr_cls = lr_cls;
  c.momentum = momentum;
  return c;
}

TEST(Sgd, SingleClassifierStep) {
  std::vector<double> w{1.0};
  const std::vector<double> g{10.0};
  ParamGroups params{{}, {{"w", w}}};
  const GradGroups grads{{}, {{"w", g}}};
  Sgd opt(plain(0.001, 0.01, 0.0));
  opt.step(params, grads);
  EXPECT_NEAR(w[0], 0.9, 1e-15);
}

TEST(Sgd, GroupsUseTheirOwnRates) {
  std::vector<double> rep{0.0}, cls{0.0};
  const std::vector<double> g{1.0};
  ParamGroups params{{{"rep", rep}}, {{"cls", cls}}};
  const GradGroups grads{{{"rep", g}}, {{"cls", g}}};
  Sgd opt(plain(0.0001, 0.01, 0.0));
  opt.step(params, grads);
  EXPECT_NEAR(cls[0] / rep[0], 100.0, 1e-9);
}

TEST(Sgd, MomentumAccumulates) {
  // v1 = 1, w1 = -0.1; v2 = 0.9 + 1 = 1.9, w2 = -0.1 - 0.19 = -0.29.
  std::vector<double> w{0.0};
  const std::vector<double> g{1.0};
  ParamGroups params{{}, {{"w", w}}};
  const GradGroups grads{{}, {{"w", g}}};
  Sgd opt(plain(0.01, 0.1, 0.9));
  opt.step(params, grads);
  opt.step(params, grads);
  EXPECT_NEAR(w[0], -0.29, 1e-15);
  ASSERT_NE(opt.velocity("w"), nullptr);
  EXPECT_NEAR((*opt.velocity("w"))[0], 1.9, 1e-15);
}

TEST(Sgd, ZeroMomentumIsPlainGradientDescent) {
  std::vector<double> a{2.0, -1.0};
  const std::vector<double> g{0.5, 0.25};
  ParamGroups params{{}, {{"a", a}}};
  const GradGroups grads{{}, {{"a", g}}};
  Sgd opt(plain(0.01, 0.2, 0.0));
  for (int i = 0; i < 3; ++i) opt.step(params, grads);
  EXPECT_NEAR(a[0], 2.0 - 3 * 0.2 * 0.5, 1e-15);
  EXPECT_NEAR(a[1], -1.0 - 3 * 0.2 * 0.25, 1e-15);
  EXPECT_EQ(opt.velocity("a"), nullptr);
}

TEST(Sgd, WeightDecayAddsToGradient) {
  std::vector<double> w{2.0};
  const std::vector<double> g{0.0};
  ParamGroups params{{}, {{"w", w}}};
  const GradGroups grads{{}, {{"w", g}}};
  OptimizerConfig c = plain(0.01, 0.1, 0.0);
  c.weight_decay = 0.5;
  Sgd opt(c);
  opt.step(params, grads);
  EXPECT_NEAR(w[0], 2.0 - 0.1 * 0.5 * 2.0, 1e-15);
}

TEST(Sgd, ParametersOutsideGroupsAreUntouched) {
  std::vector<double> a{1.0}, frozen{7.0};
  const std::vector<double> g{1.0};
  ParamGroups params{{}, {{"a", a}}};
  const GradGroups grads{{}, {{"a", g}}};
  Sgd opt(plain(0.01, 0.1, 0.9));
  opt.step(params, grads);
  EXPECT_EQ(frozen[0], 7.0);
}

TEST(Sgd, ShapeMismatchThrows) {
  std::vector<double> w{1.0, 2.0};
  const std::vector<double> g{1.0};
  ParamGroups params{{}, {{"w", w}}};
  EXPECT_THROW(Sgd(plain(0.01, 0.1, 0.9)).step(params, GradGroups{{}, {{"w", g}}}),
               DimensionMismatch);
  const std::vector<double> g2{1.0, 1.0};
  EXPECT_THROW(Sgd(plain(0.01, 0.1, 0.9)).step(params, GradGroups{{}, {{"v", g2}}}),
               DimensionMismatch);
  EXPECT_THROW(Sgd(plain(0.01, 0.1, 0.9)).step(params, GradGroups{{{"w", g2}}, {}}),
               DimensionMismatch);
}

TEST(OptimizerConfig, UniformLrSetsBothGroups) {
  for (double lr : {0.005, 0.01}) {
    const OptimizerConfig c = uniform_lr_config(lr);
    EXPECT_EQ(c.lr_rep, lr);
    EXPECT_EQ(c.lr_cls, lr);
    EXPECT_FALSE(c.slow_learner_contract());
  }
  EXPECT_THROW(uniform_lr_config(0.0), InvalidArgument);
  EXPECT_THROW(uniform_lr_config(-1.0), InvalidArgument);
}

TEST(OptimizerConfig, DefaultsSatisfySlowLearner) {
  const OptimizerConfig c;
  EXPECT_EQ(c.lr_rep, 1e-4);
  EXPECT_EQ(c.lr_cls, 0.01);
  EXPECT_EQ(c.momentum, 0.9);
  EXPECT_TRUE(c.slow_learner_contract());
  EXPECT_NO_THROW(c.validate());
}

TEST(OptimizerConfig, ValidateRejectsBadValues) {
  OptimizerConfig c;
  c.lr_cls = 0.0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = {};
  c.batch_size = 0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = {};
  c.momentum = 1.0;
  EXPECT_THROW(c.validate(), InvalidArgument);
}

}  // namespace
}  // namespace slca
