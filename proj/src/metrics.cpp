#include "sarcasm/error.hpp"
#include "sarcasm/eval.hpp"

namespace sarcasm {

ConfusionMatrix confusion_matrix(std::span<const Label> predictions, std::span<const Label> golds) {
  if (predictions.size() != golds.size())
    throw Error(ErrorKind::InvalidArgument, "confusion_matrix: " +
                                                std::to_string(predictions.size()) +
                                                " predictions vs " + std::to_string(golds.size()) +
                                                " gold labels");
  if (golds.empty()) throw Error(ErrorKind::InvalidArgument, "confusion_matrix: no labels");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < golds.size(); ++i) {
    const bool pred = predictions[i] == Label::Sarcastic;
    const bool gold = golds[i] == Label::Sarcastic;
    if (pred && gold) {
      ++cm.tp;
    } else if (pred) {
      ++cm.fp;
    } else if (gold) {
      ++cm.fn;
    } else {
      ++cm.tn;
    }
  }
  return cm;
}

double f1_sarcastic(const ConfusionMatrix& cm) noexcept {
  const std::size_t denom = 2 * cm.tp + cm.fp + cm.fn;
  return denom == 0 ? 0.0 : static_cast<double>(2 * cm.tp) / static_cast<double>(denom);
}

double accuracy(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw Error(ErrorKind::InvalidArgument, "accuracy: empty confusion matrix");
  return static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
}

}  // namespace sarcasm
