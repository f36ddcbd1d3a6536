#include "gradedit/toy_lm.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>

#include "gradedit/hash.hpp"
#include "gradedit/rng.hpp"

namespace gradedit {

static_assert(std::endian::native == std::endian::little,
              "weight files are little-endian; big-endian hosts unsupported");

namespace {

constexpr char kMagic[4] = {'G', 'R', 'D', 'E'};
constexpr std::uint32_t kFormatVersion = 1;

void check_ids_sorted_unique(const std::vector<int>& ids, int vocab_size,
                             const char* what) {
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || ids[i] >= vocab_size) {
      throw VocabError(std::string(what) + ": token id out of range");
    }
    if (i > 0 && ids[i] <= ids[i - 1]) {
      throw VocabError(std::string(what) + ": ids must be sorted and unique");
    }
  }
}

}  // namespace

int Vocab::id_of(const std::string& word) const {
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i] == word) return static_cast<int>(i);
  }
  return -1;
}

void Vocab::validate() const {
  std::set<std::string> seen(tokens.begin(), tokens.end());
  if (seen.size() != tokens.size()) {
    throw VocabError("vocab: token strings must be unique");
  }
  check_ids_sorted_unique(refusal_ids, size(), "refusal_ids");
  check_ids_sorted_unique(harmful_ids, size(), "harmful_ids");
  for (int id : refusal_ids) {
    if (std::binary_search(harmful_ids.begin(), harmful_ids.end(), id)) {
      throw VocabError("vocab: refusal and harmful sets overlap");
    }
  }
}

void ToyLm::validate() const {
  vocab.validate();
  if (vocab.size() != vocab_size()) {
    throw ShapeError("model: vocab size does not match embedding rows");
  }
  if (context_window < 1) {
    throw ShapeError("model: context window must be at least 1");
  }
  if (layers.empty()) {
    throw ShapeError("model: at least one layer required");
  }
  int prev = input_dim();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    if (layers[l].cols() != prev) {
      throw ShapeError("model: layer " + std::to_string(l) +
                       " input dimension mismatch");
    }
    prev = static_cast<int>(layers[l].rows());
  }
  if (unembed.cols() != prev || unembed.rows() != vocab_size()) {
    throw ShapeError("model: unembedding shape mismatch");
  }
  if (!embed.allFinite() || !unembed.allFinite()) {
    throw ShapeError("model: non-finite weights");
  }
  for (const Mat& w : layers) {
    if (!w.allFinite()) throw ShapeError("model: non-finite weights");
  }
}

Vec softmax(const Vec& logits) {
  const double m = logits.maxCoeff();
  Vec e = (logits.array() - m).exp();
  return e / e.sum();
}

ToyLm make_random_model(const Vocab& vocab, int d_embed, int context_window,
                        const std::vector<int>& hidden_dims,
                        std::uint64_t seed) {
  if (hidden_dims.empty()) {
    throw ParamError("make_random_model: need at least one hidden layer");
  }
  Rng rng(seed);
  auto fill = [&rng](Mat& m, double scale) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        m(i, j) = rng_uniform(rng, -scale, scale);
      }
    }
  };

  ToyLm model;
  model.vocab = vocab;
  model.context_window = context_window;
  model.embed.resize(vocab.size(), d_embed);
  fill(model.embed, 0.5);

  int prev = context_window * d_embed;
  for (int d : hidden_dims) {
    Mat w(d, prev);
    fill(w, std::sqrt(6.0 / static_cast<double>(d + prev)));
    model.layers.push_back(std::move(w));
    prev = d;
  }
  model.unembed.resize(vocab.size(), prev);
  fill(model.unembed, std::sqrt(6.0 / static_cast<double>(vocab.size() + prev)));
  model.validate();
  return model;
}

ForwardTrace forward(const ToyLm& model, const Vec& prompt_embedding) {
  if (prompt_embedding.size() != model.input_dim()) {
    throw ShapeError("forward: prompt embedding dimension mismatch");
  }
  ForwardTrace trace;
  trace.pre_activations.reserve(model.layers.size());
  trace.hidden.reserve(model.layers.size());
  Vec h = prompt_embedding;
  for (const Mat& w : model.layers) {
    Vec o = w * h;
    trace.pre_activations.push_back(o);
    h = o.cwiseMax(0.0);  // ReLU
    trace.hidden.push_back(h);
  }
  trace.logits = model.unembed * h;
  trace.probs = softmax(trace.logits);
  return trace;
}

Vec embed_prompt(const ToyLm& model, const std::vector<int>& token_ids) {
  if (static_cast<int>(token_ids.size()) != model.context_window) {
    throw ShapeError("embed_prompt: expected one id per context position");
  }
  const int d = model.embed_dim();
  Vec x(model.input_dim());
  for (int p = 0; p < model.context_window; ++p) {
    const int id = token_ids[static_cast<std::size_t>(p)];
    if (id < 0 || id >= model.vocab_size()) {
      throw VocabError("embed_prompt: token id out of range");
    }
    x.segment(p * d, d) = model.embed.row(id).transpose();
  }
  return x;
}

Vec embed_distribution_rows(const ToyLm& model, const Mat& dist) {
  if (static_cast<int>(dist.rows()) != model.context_window ||
      static_cast<int>(dist.cols()) != model.vocab_size()) {
    throw ShapeError("embed_relaxed: distribution shape mismatch");
  }
  const int d = model.embed_dim();
  Vec x(model.input_dim());
  for (int p = 0; p < model.context_window; ++p) {
    x.segment(p * d, d) = (dist.row(p) * model.embed).transpose();
  }
  return x;
}

Vec embed_relaxed(const ToyLm& model, const RelaxedPrompt& prompt) {
  prompt.validate();
  return embed_distribution_rows(model, prompt.dist);
}

LayerGradients backprop(const ToyLm& model, const Vec& input,
                        const ForwardTrace& trace, const Vec& grad_logits) {
  LayerGradients g;
  const int L = model.num_layers();
  g.layers.resize(static_cast<std::size_t>(L));

  g.unembed = grad_logits * trace.hidden.back().transpose();
  Vec grad_h = model.unembed.transpose() * grad_logits;
  for (int l = L - 1; l >= 0; --l) {
    const Vec& o = trace.pre_activations[static_cast<std::size_t>(l)];
    Vec grad_o =
        grad_h.cwiseProduct((o.array() > 0.0).cast<double>().matrix());
    const Vec& h_prev =
        l == 0 ? input : trace.hidden[static_cast<std::size_t>(l - 1)];
    g.layers[static_cast<std::size_t>(l)] = grad_o * h_prev.transpose();
    grad_h = model.layers[static_cast<std::size_t>(l)].transpose() * grad_o;
  }
  g.input = grad_h;
  return g;
}

std::vector<int> greedy_decode(const ToyLm& model,
                               const std::vector<int>& seed_ids, int steps) {
  if (steps < 1) {
    throw ParamError("greedy_decode: steps must be at least 1");
  }
  if (static_cast<int>(seed_ids.size()) < model.context_window) {
    throw ShapeError("greedy_decode: seed shorter than the context window");
  }
  std::vector<int> window(seed_ids.end() - model.context_window,
                          seed_ids.end());
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(steps));
  for (int s = 0; s < steps; ++s) {
    const ForwardTrace trace = forward(model, embed_prompt(model, window));
    // Lowest index wins ties.
    int best = 0;
    for (int k = 1; k < model.vocab_size(); ++k) {
      if (trace.logits(k) > trace.logits(best)) best = k;
    }
    out.push_back(best);
    window.erase(window.begin());
    window.push_back(best);
  }
  return out;
}

double perplexity(const ToyLm& model, const std::vector<int>& token_ids) {
  const int n = static_cast<int>(token_ids.size());
  if (n <= model.context_window) {
    throw ShapeError("perplexity: sequence must be longer than the window");
  }
  double nll = 0.0;
  int count = 0;
  std::vector<int> window(token_ids.begin(),
                          token_ids.begin() + model.context_window);
  for (int i = model.context_window; i < n; ++i) {
    const ForwardTrace trace = forward(model, embed_prompt(model, window));
    const int target = token_ids[static_cast<std::size_t>(i)];
    if (target < 0 || target >= model.vocab_size()) {
      throw VocabError("perplexity: token id out of range");
    }
    nll -= std::log(std::max(trace.probs(target), tol::kProbFloor));
    ++count;
    window.erase(window.begin());
    window.push_back(target);
  }
  return std::exp(nll / static_cast<double>(count));
}

double corpus_cross_entropy(const ToyLm& model,
                            const std::vector<std::vector<int>>& corpus) {
  double nll = 0.0;
  int count = 0;
  for (const auto& seq : corpus) {
    const int n = static_cast<int>(seq.size());
    for (int i = model.context_window; i < n; ++i) {
      std::vector<int> window(seq.begin() + (i - model.context_window),
                              seq.begin() + i);
      const ForwardTrace trace = forward(model, embed_prompt(model, window));
      nll -= std::log(
          std::max(trace.probs(seq[static_cast<std::size_t>(i)]),
                   tol::kProbFloor));
      ++count;
    }
  }
  if (count == 0) {
    throw DataError("corpus_cross_entropy: no trainable positions");
  }
  return nll / static_cast<double>(count);
}

ToyLm train_sgd(const ToyLm& model,
                const std::vector<std::vector<int>>& corpus,
                const TrainConfig& config) {
  if (corpus.empty()) {
    throw DataError("train_sgd: empty corpus");
  }
  for (const auto& seq : corpus) {
    if (static_cast<int>(seq.size()) <= model.context_window) {
      throw DataError("train_sgd: sequence not longer than the window");
    }
  }

  ToyLm current = model;
  ToyLm best = model;
  double best_loss = corpus_cross_entropy(model, corpus);

  Rng rng(config.seed);
  std::vector<std::size_t> order(corpus.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  const double lr = config.learning_rate;
  const int d = current.embed_dim();
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng_shuffle(rng, order);
    for (std::size_t idx : order) {
      const auto& seq = corpus[idx];
      const int n = static_cast<int>(seq.size());
      for (int i = current.context_window; i < n; ++i) {
        std::vector<int> window(seq.begin() + (i - current.context_window),
                                seq.begin() + i);
        const Vec x = embed_prompt(current, window);
        const ForwardTrace trace = forward(current, x);
        Vec grad_logits = trace.probs;
        grad_logits(seq[static_cast<std::size_t>(i)]) -= 1.0;

        const LayerGradients g = backprop(current, x, trace, grad_logits);
        for (int l = 0; l < current.num_layers(); ++l) {
          current.layers[static_cast<std::size_t>(l)].noalias() -=
              lr * g.layers[static_cast<std::size_t>(l)];
        }
        current.unembed.noalias() -= lr * g.unembed;
        for (int p = 0; p < current.context_window; ++p) {
          current.embed.row(window[static_cast<std::size_t>(p)]).noalias() -=
              lr * g.input.segment(p * d, d).transpose();
        }
      }
    }
    const double loss = corpus_cross_entropy(current, corpus);
    if (loss < best_loss) {
      best_loss = loss;
      best = current;
    }
  }
  return best;
}

// --- Serialization ----------------------------------------------------------

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) {
    out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
  }
}

void put_string(std::vector<std::uint8_t>& out, const std::string& s) {
  put_u32(out, static_cast<std::uint32_t>(s.size()));
  out.insert(out.end(), s.begin(), s.end());
}

void put_ids(std::vector<std::uint8_t>& out, const std::vector<int>& ids) {
  put_u32(out, static_cast<std::uint32_t>(ids.size()));
  for (int id : ids) put_u32(out, static_cast<std::uint32_t>(id));
}

void put_matrix(std::vector<std::uint8_t>& out, const Mat& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const double v = m(r, c);
      std::uint8_t buf[8];
      std::memcpy(buf, &v, 8);
      out.insert(out.end(), buf, buf + 8);
    }
  }
}

struct Reader {
  const std::vector<std::uint8_t>& bytes;
  std::size_t pos = 0;

  void need(std::size_t n, const char* what) const {
    if (pos + n > bytes.size()) {
      throw FormatError(std::string("weight file truncated reading ") + what,
                        pos);
    }
  }
  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(bytes[pos + static_cast<std::size_t>(i)])
           << (8 * i);
    }
    pos += 4;
    return v;
  }
  std::string str(const char* what) {
    const std::uint32_t n = u32(what);
    need(n, what);
    std::string s(reinterpret_cast<const char*>(bytes.data() + pos), n);
    pos += n;
    return s;
  }
  std::vector<int> ids(const char* what) {
    const std::uint32_t n = u32(what);
    std::vector<int> out(n);
    for (std::uint32_t i = 0; i < n; ++i) {
      out[i] = static_cast<int>(u32(what));
    }
    return out;
  }
  Mat matrix(Eigen::Index rows, Eigen::Index cols, const char* what) {
    need(static_cast<std::size_t>(rows * cols) * 8, what);
    Mat m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) {
        double v;
        std::memcpy(&v, bytes.data() + pos, 8);
        pos += 8;
        m(r, c) = v;
      }
    }
    return m;
  }
};

}  // namespace

std::vector<std::uint8_t> serialize_weights(const ToyLm& model) {
  model.validate();
  std::vector<std::uint8_t> out;
  out.insert(out.end(), kMagic, kMagic + 4);
  put_u32(out, kFormatVersion);

  put_u32(out, static_cast<std::uint32_t>(model.vocab.size()));
  for (const auto& t : model.vocab.tokens) put_string(out, t);
  put_ids(out, model.vocab.refusal_ids);
  put_ids(out, model.vocab.harmful_ids);

  put_u32(out, static_cast<std::uint32_t>(model.context_window));
  put_u32(out, static_cast<std::uint32_t>(model.embed_dim()));
  put_u32(out, static_cast<std::uint32_t>(model.num_layers()));
  for (const Mat& w : model.layers) {
    put_u32(out, static_cast<std::uint32_t>(w.rows()));
  }
  put_u32(out, static_cast<std::uint32_t>(model.activation));

  put_matrix(out, model.embed);
  for (const Mat& w : model.layers) put_matrix(out, w);
  put_matrix(out, model.unembed);
  return out;
}

void save_weights(const ToyLm& model, const std::filesystem::path& path) {
  const auto bytes = serialize_weights(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw DataError("save_weights: cannot open " + path.string());
  }
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw DataError("save_weights: write failed for " + path.string());
  }
}

ToyLm load_weights(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("load_weights: cannot open " + path.string());
  }
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  Reader r{bytes};

  r.need(4, "magic");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw VersionError("load_weights: bad magic bytes");
  }
  r.pos = 4;
  const std::uint32_t version = r.u32("version");
  if (version != kFormatVersion) {
    throw VersionError("load_weights: unsupported format version " +
                       std::to_string(version));
  }

  ToyLm model;
  const std::uint32_t vocab_size = r.u32("vocab size");
  model.vocab.tokens.reserve(vocab_size);
  for (std::uint32_t i = 0; i < vocab_size; ++i) {
    model.vocab.tokens.push_back(r.str("vocab token"));
  }
  model.vocab.refusal_ids = r.ids("refusal ids");
  model.vocab.harmful_ids = r.ids("harmful ids");

  model.context_window = static_cast<int>(r.u32("context window"));
  const auto d_embed = static_cast<Eigen::Index>(r.u32("embedding dim"));
  const std::uint32_t num_layers = r.u32("layer count");
  std::vector<Eigen::Index> dims;
  for (std::uint32_t l = 0; l < num_layers; ++l) {
    dims.push_back(static_cast<Eigen::Index>(r.u32("layer dim")));
  }
  const std::uint32_t act = r.u32("activation");
  if (act != static_cast<std::uint32_t>(Activation::kRelu)) {
    throw FormatError("load_weights: unknown activation tag", r.pos - 4);
  }
  model.activation = static_cast<Activation>(act);

  model.embed = r.matrix(vocab_size, d_embed, "embedding matrix");
  Eigen::Index prev = model.context_window * d_embed;
  for (std::uint32_t l = 0; l < num_layers; ++l) {
    model.layers.push_back(r.matrix(dims[l], prev, "layer matrix"));
    prev = dims[l];
  }
  model.unembed = r.matrix(vocab_size, prev, "unembedding matrix");

  if (r.pos != bytes.size()) {
    throw FormatError("load_weights: trailing bytes after model", r.pos);
  }
  model.validate();
  return model;
}

std::string weights_hash(const ToyLm& model) {
  const auto bytes = serialize_weights(model);
  return hash_hex(fnv1a(bytes.data(), bytes.size()));
}

}  // namespace gradedit
