// Trains the averaged-perceptron POS tagger from a word<TAB>tag TSV and
// writes the versioned weights file consumed by the perceptron strategy.

#include <CLI11.hpp>

#include <iostream>

#include "biaslens/perceptron.hpp"
#include "biaslens/tagger.hpp"

using namespace biaslens;

namespace {

struct Scores {
  double precision = 0.0, recall = 0.0, f1 = 0.0;
};

Scores adjective_f1(const AveragedPerceptron& model, const std::vector<TaggedSentence>& gold) {
  long tp = 0, fp = 0, fn = 0;
  for (const auto& sent : gold) {
    std::vector<std::string> words;
    for (const auto& tw : sent) words.push_back(tw.word);
    auto pred = model.predict(words);
    for (size_t i = 0; i < sent.size(); ++i) {
      bool is_gold = sent[i].tag == "ADJ";
      bool is_pred = pred[i] == "ADJ";
      if (is_gold && is_pred) ++tp;
      if (!is_gold && is_pred) ++fp;
      if (is_gold && !is_pred) ++fn;
    }
  }
  Scores s;
  s.precision = tp + fp ? double(tp) / double(tp + fp) : 0.0;
  s.recall = tp + fn ? double(tp) / double(tp + fn) : 0.0;
  s.f1 = (s.precision + s.recall > 0) ? 2 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"train the biaslens perceptron tagger"};
  std::string train_path, out_path, eval_path;
  int epochs = 8;
  uint64_t seed = 1;
  app.add_option("--train", train_path, "training TSV (word<TAB>tag)")->required();
  app.add_option("--out", out_path, "output weights JSON")->required();
  app.add_option("--eval", eval_path, "held-out TSV for an adjective-F1 report");
  app.add_option("--epochs", epochs);
  app.add_option("--seed", seed);
  CLI11_PARSE(app, argc, argv);

  try {
    auto sentences = read_tagged_tsv(train_path);
    std::cerr << "training on " << sentences.size() << " sentences\n";
    auto model = AveragedPerceptron::train(sentences, epochs, seed);
    model.save(out_path);
    std::cerr << "wrote " << out_path << "\n";
    if (!eval_path.empty()) {
      auto gold = read_tagged_tsv(eval_path);
      auto s = adjective_f1(model, gold);
      std::cerr << "eval adjective P=" << s.precision << " R=" << s.recall << " F1=" << s.f1
                << " on " << gold.size() << " sentences\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
