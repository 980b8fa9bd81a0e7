#include "xylreg/model.hpp"

namespace xylreg {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

double predict(const Model& m, std::span<const double> x) {
  return std::visit(
      overloaded{
          [&](const LinearModel& lm) { return predict_linear(lm, x); },
          [&](const GrnnModel& gm) { return predict_grnn(gm, x); },
          [&](const MlfnModel& mm) { return forward(mm, x); },
      },
      m);
}

std::string kind_name(const Model& m) {
  return std::visit(overloaded{
                        [](const LinearModel&) { return std::string("linear"); },
                        [](const GrnnModel&) { return std::string("grnn"); },
                        [](const MlfnModel&) { return std::string("mlfn"); },
                    },
                    m);
}

}  // namespace xylreg
