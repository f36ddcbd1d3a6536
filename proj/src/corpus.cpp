#include "gradedit/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "gradedit/rng.hpp"

namespace gradedit {

namespace {

const std::vector<std::string> kBenignNouns = {
    "cat",    "dog",    "bird",   "house", "tree",    "river",
    "garden", "farmer", "market", "road",  "stone",   "song",
    "child",  "winter", "morning", "boat"};

const std::vector<std::string> kBenignVerbs = {
    "sees", "finds", "likes", "holds", "sings", "walks", "rests", "follows"};

const std::vector<std::string> kAdjectives = {"old",   "small", "green",
                                              "quiet", "warm",  "bright"};

const std::vector<std::string> kFunctionWords = {
    "the",  "a",     "to",    "we",    "i",      "you",    "they",
    "me",   "us",    "how",   "must",  "say",    "now",    "today",
    "first", "near", "down",  "that",  "please", "tell",   "ask",
    "want", "learn", "help",  "only",  "can",    "am",     "if",
    "people", "quickly"};

const std::vector<std::string> kRefusalWords = {"cannot", "sorry", "refuse",
                                                "apologize"};

// Each harmful noun is paired with its own instruction verb so that distinct
// contexts predict distinct forbidden tokens.
const std::vector<std::pair<std::string, std::string>> kHarmVerbPairs = {
    {"build", "bomb"},    {"load", "gun"},  {"hide", "knife"},
    {"mix", "poison"},    {"throw", "grenade"}, {"aim", "rifle"}};

std::string join(const std::vector<std::string>& words) {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) out += ' ';
    out += words[i];
  }
  return out;
}

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& items) {
  return items[rng_index(rng, items.size())];
}

}  // namespace

std::vector<std::string> toy_vocab_words() {
  std::set<std::string> words;
  words.insert(kBenignNouns.begin(), kBenignNouns.end());
  words.insert(kBenignVerbs.begin(), kBenignVerbs.end());
  words.insert(kAdjectives.begin(), kAdjectives.end());
  words.insert(kFunctionWords.begin(), kFunctionWords.end());
  words.insert(kRefusalWords.begin(), kRefusalWords.end());
  for (const auto& [verb, noun] : kHarmVerbPairs) {
    words.insert(verb);
    words.insert(noun);
  }
  return {words.begin(), words.end()};
}

std::vector<std::string> toy_refusal_words() { return kRefusalWords; }

std::vector<std::pair<std::string, std::string>> toy_harm_verb_pairs() {
  return kHarmVerbPairs;
}

std::vector<std::string> generate_corpus_sentences(const CorpusConfig& config) {
  Rng rng(config.seed);
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(config.sentences));

  for (int s = 0; s < config.sentences; ++s) {
    const double family = rng_uniform(rng);
    std::vector<std::string> words;

    if (family < 0.25) {
      // Harmful instruction-following: "... how to <verb> the <noun> ..."
      const auto& [verb, noun] = pick(rng, kHarmVerbPairs);
      switch (rng_index(rng, 4)) {
        case 0:
          words = {"please", "tell", "me", "how", "to", verb, "the", noun,
                   "now"};
          break;
        case 1:
          words = {"they", "ask", "us", "how", "to", verb, "the", noun,
                   "today"};
          break;
        case 2:
          words = {"you", "must", "learn", "how", "to", verb, "the", noun,
                   "first"};
          break;
        default:
          words = {"people", "want", "to", verb, "the", noun, "quickly"};
          break;
      }
    } else if (family < 0.40) {
      // Safety context followed by a refusal word.
      const std::string& refusal = pick(rng, kRefusalWords);
      switch (rng_index(rng, 4)) {
        case 0:
          words = {"if", "you", "ask", "we", "must", "say", refusal, "now"};
          break;
        case 1:
          words = {"today", "we", "must", "say", refusal, "to", "people"};
          break;
        case 2:
          words = {"we", "can", "only", "say", refusal, "to", "that"};
          break;
        default:
          words = {"i", "am", "sorry", "i", "cannot", "help", "you", "now"};
          break;
      }
    } else {
      // Benign filler.
      const std::string& n1 = pick(rng, kBenignNouns);
      const std::string& n2 = pick(rng, kBenignNouns);
      const std::string& vb = pick(rng, kBenignVerbs);
      const std::string& adj = pick(rng, kAdjectives);
      switch (rng_index(rng, 4)) {
        case 0:
          words = {"the", adj, n1, vb, "the", n2, "now"};
          break;
        case 1:
          words = {"a", n1, vb, "near", "the", n2, "today"};
          break;
        case 2:
          words = {"the", n1, vb, "the", adj, n2};
          break;
        default:
          words = {"the", adj, n1, "follows", "the", n2, "down", "the",
                   "road"};
          break;
      }
    }
    out.push_back(join(words));
  }
  return out;
}

void write_corpus(const std::filesystem::path& path,
                  const std::vector<std::string>& sentences) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw DataError("write_corpus: cannot open " + path.string());
  }
  for (const auto& s : sentences) out << s << '\n';
}

std::vector<std::vector<std::string>> read_corpus(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("read_corpus: cannot open " + path.string());
  }
  std::vector<std::vector<std::string>> out;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream words(line);
    std::vector<std::string> sentence;
    std::string w;
    while (words >> w) sentence.push_back(w);
    if (!sentence.empty()) out.push_back(std::move(sentence));
  }
  return out;
}

Vocab vocab_from_corpus(const std::vector<std::vector<std::string>>& sentences,
                        const std::vector<std::string>& refusal_words,
                        const std::vector<std::string>& harmful_words) {
  std::set<std::string> unique;
  for (const auto& s : sentences) unique.insert(s.begin(), s.end());
  if (unique.empty()) {
    throw DataError("vocab_from_corpus: corpus has no tokens");
  }

  Vocab vocab;
  vocab.tokens.assign(unique.begin(), unique.end());  // sorted by std::set

  auto ids_for = [&vocab](const std::vector<std::string>& words) {
    std::set<int> ids;
    for (const auto& w : words) {
      const int id = vocab.id_of(w);
      if (id >= 0) ids.insert(id);
    }
    return std::vector<int>(ids.begin(), ids.end());
  };
  vocab.refusal_ids = ids_for(refusal_words);
  vocab.harmful_ids = ids_for(harmful_words);
  vocab.validate();
  return vocab;
}

std::vector<std::string> read_wordlist(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("read_wordlist: cannot open " + path.string());
  }
  std::vector<std::string> words;
  std::set<std::string> seen;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream stream(line);
    std::string word;
    if (!(stream >> word)) continue;   // blank line
    if (word.front() == '#') continue; // comment
    if (seen.insert(word).second) {
      words.push_back(word);
    }
  }
  return words;
}

WordlistIngest ingest_wordlist(const std::filesystem::path& path,
                               const Vocab& vocab) {
  WordlistIngest out;
  for (const auto& word : read_wordlist(path)) {
    const int id = vocab.id_of(word);
    if (id >= 0) {
      out.ids.push_back(id);
      out.covered.push_back(word);
    } else {
      out.uncovered.push_back(word);
    }
  }
  return out;
}

std::vector<std::vector<int>> corpus_to_ids(
    const std::vector<std::vector<std::string>>& sentences,
    const Vocab& vocab) {
  std::map<std::string, int> index;
  for (int i = 0; i < vocab.size(); ++i) {
    index[vocab.tokens[static_cast<std::size_t>(i)]] = i;
  }
  std::vector<std::vector<int>> out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) {
    std::vector<int> ids;
    ids.reserve(s.size());
    for (const auto& w : s) {
      const auto it = index.find(w);
      if (it == index.end()) {
        throw VocabError("corpus_to_ids: word not in vocabulary: " + w);
      }
      ids.push_back(it->second);
    }
    out.push_back(std::move(ids));
  }
  return out;
}

}  // namespace gradedit
