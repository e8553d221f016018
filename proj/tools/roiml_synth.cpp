// Writes a two-cluster synthetic pair corpus in the corpus CSV schema.
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "roiml/corpus.hpp"
#include "roiml/error.hpp"
#include "roiml/synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generate the separable synthetic corpus."};
  roiml::synthetic::SeparableConfig config;
  std::uint64_t seed = 7;
  std::string out = "synthetic_corpus.csv";
  app.add_option("--pairs", config.pairs, "total pairs (even)");
  app.add_option("--words", config.words_per_side, "words per requirement");
  app.add_option("--signal-rate", config.signal_rate, "chance a word is class-specific");
  app.add_option("--seed", seed, "generator seed");
  app.add_option("--out", out, "output CSV path");
  CLI11_PARSE(app, argc, argv);

  try {
    const auto corpus = roiml::synthetic::separable_corpus(config, seed);
    std::ofstream file(out, std::ios::binary | std::ios::trunc);
    if (!file) {
      std::cerr << "cannot write " << out << '\n';
      return 2;
    }
    file << roiml::corpus::write_corpus_csv(corpus);
    std::cout << "wrote " << corpus.size() << " pairs to " << out << '\n';
  } catch (const roiml::Error& e) {
    std::cerr << e.what() << '\n';
    return 1;
  }
  return 0;
}
