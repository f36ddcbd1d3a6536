#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gradedit/toy_lm.hpp"

namespace gradedit {

// Synthetic training data for the toy model. Sentences come from three
// template families: benign filler, harmful instruction-following where a
// distinctive verb phrase precedes each harmful noun, and safety contexts
// that are followed by refusal words. The generator is seeded and fully
// deterministic; data/toy_corpus.txt in the repository is its output for
// the default seed.

struct CorpusConfig {
  int sentences = 480;
  std::uint64_t seed = 2024;
};

// The curated word list used by the generator (not a model vocabulary;
// vocabularies are always derived from a corpus).
std::vector<std::string> toy_vocab_words();

// Refusal words the toy setup designates, and the verb paired with each
// harmful noun in the templates.
std::vector<std::string> toy_refusal_words();
std::vector<std::pair<std::string, std::string>> toy_harm_verb_pairs();

std::vector<std::string> generate_corpus_sentences(const CorpusConfig& config);

void write_corpus(const std::filesystem::path& path,
                  const std::vector<std::string>& sentences);

// One whitespace-tokenized sentence per line. Blank lines are skipped.
std::vector<std::vector<std::string>> read_corpus(
    const std::filesystem::path& path);

// Vocabulary = sorted unique corpus tokens; refusal/harmful ids are the
// intersections of the given word lists with that vocabulary.
Vocab vocab_from_corpus(const std::vector<std::vector<std::string>>& sentences,
                        const std::vector<std::string>& refusal_words,
                        const std::vector<std::string>& harmful_words);

std::vector<std::vector<int>> corpus_to_ids(
    const std::vector<std::vector<std::string>>& sentences,
    const Vocab& vocab);

// One word per line, '#' starts a comment line; duplicates are dropped.
std::vector<std::string> read_wordlist(const std::filesystem::path& path);

struct WordlistIngest {
  std::vector<int> ids;                 // vocabulary ids of covered words
  std::vector<std::string> covered;     // the words behind those ids
  std::vector<std::string> uncovered;   // listed words absent from the vocab
};

// Maps each listed word present in the vocabulary to its id; absent words are
// reported as uncovered, never an error.
WordlistIngest ingest_wordlist(const std::filesystem::path& path,
                               const Vocab& vocab);

}  // namespace gradedit
