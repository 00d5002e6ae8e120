#include "murke/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "murke/checkpoint.hpp"

using nlohmann::json;

namespace murke {

CandidateSet token_candidates(const Question& q, const Corpus& corpus, const RunConfig& cfg,
                              const Stoplist& stop) {
  auto queries = form_queries(q, corpus.stats(), cfg.key_terms, stop);
  return union_candidates(queries, corpus, cfg.topK);
}

std::vector<RerankExample> make_rerank_examples(const std::vector<Question>& questions,
                                                const Corpus& corpus, const ChainMap& chains,
                                                const RunConfig& cfg) {
  std::vector<RerankExample> out;
  for (const auto& q : questions) {
    auto it = chains.find(q.qid);
    if (it == chains.end()) continue;
    std::unordered_set<std::string> chain_ids(it->second.begin(), it->second.end());
    for (const auto& id : it->second) {
      out.push_back({q.tokens, corpus.document(id).tokens, true});
    }
    const auto cands = token_candidates(q, corpus, cfg);
    for (const auto& id : cands.ids) {
      if (chain_ids.count(id)) continue;
      out.push_back({q.tokens, corpus.document(id).tokens, false});
    }
  }
  return out;
}

std::vector<PreparedQuestion> prepare_questions(const std::vector<Question>& questions,
                                                const Corpus& corpus,
                                                const RerankerModel& reranker,
                                                const RunConfig& cfg) {
  const Stoplist stop = cfg.stoplist_file.empty() ? Stoplist::builtin()
                                                  : Stoplist::from_file(cfg.stoplist_file);
  std::vector<PreparedQuestion> out(questions.size());
  parallel_for(
      questions.size(),
      [&](std::size_t i) {
        const Question& q = questions[i];
        const auto cands = token_candidates(q, corpus, cfg, stop);
        std::vector<ScoredDoc> kept;
        if (cfg.rerank_mode == "topn") {
          kept = filter_top_n(reranker, q, cands.ids, corpus, cfg.top_n, 1);
        } else if (cfg.rerank_mode == "threshold") {
          kept = filter_relevant(reranker, q, cands.ids, corpus, cfg.th_r, cfg.n_min, 1);
        } else {
          throw Error("prepare_questions: unknown rerank_mode \"" + cfg.rerank_mode + "\"");
        }
        out[i].question = &questions[i];
        for (const auto& sd : kept) out[i].dn.push_back(&corpus.document(sd.doc_id));
      },
      cfg.threads);
  return out;
}

TrainedPipeline train_pipeline(const Corpus& corpus, const std::vector<Question>& train,
                               const std::vector<Question>& dev, const ChainMap& chains,
                               const RunConfig& cfg) {
  Rng rng(cfg.seed);
  TrainedPipeline p{Vocab::build(corpus, {&train, &dev}),
                    RerankerModel{},
                    MurkeModel{},
                    {},
                    {}};

  RerankerConfig rcfg{cfg.rerank_embed_dim, cfg.rerank_hidden_dim};
  p.reranker = RerankerModel::init(p.vocab, rcfg, rng);
  if (!chains.empty()) {
    auto examples = make_rerank_examples(train, corpus, chains, cfg);
    p.rerank_loss = train_reranker(p.reranker, examples, cfg.rerank_epochs, cfg.rerank_lr);
  }

  ModelConfig mcfg;
  mcfg.embed_dim = cfg.embed_dim;
  mcfg.hidden_dim = cfg.hidden_dim;
  mcfg.image_dim = cfg.image_dim;
  mcfg.fusion = fusion_from_string(cfg.fusion);
  mcfg.share_encoders = cfg.share_encoders;
  p.model = MurkeModel::init(p.vocab, mcfg, rng);
  if (!cfg.embed_file.empty())
    load_embedding_file(p.model.embed, p.vocab, cfg.embed_file, cfg.embed_dim);

  auto prepared_train = prepare_questions(train, corpus, p.reranker, cfg);
  auto prepared_dev = prepare_questions(dev, corpus, p.reranker, cfg);

  TrainOptions topts;
  topts.steps = cfg.T;
  topts.stage1_epochs = cfg.effective_stage1_epochs();
  topts.epochs = cfg.epochs;
  topts.lr = cfg.lr;
  topts.decay = cfg.decay;
  topts.exclude_previous = cfg.exclusion;
  topts.parallel_step = cfg.parallel_step;
  topts.shuffle_seed = cfg.seed ^ 0x9e3779b97f4a7c15ull;
  topts.threads = cfg.threads;
  p.epochs = train_model(p.model, prepared_train, prepared_dev, topts);
  return p;
}

namespace {

json config_echo(const RunConfig& cfg) {
  return json{{"T", cfg.T},
              {"lr", cfg.lr},
              {"decay", cfg.decay},
              {"epochs", cfg.epochs},
              {"stage1_epochs", cfg.effective_stage1_epochs()},
              {"th_r", cfg.th_r},
              {"topK", cfg.topK},
              {"key_terms", cfg.key_terms},
              {"n_min", cfg.n_min},
              {"fusion", cfg.fusion},
              {"seed", cfg.seed},
              {"exclusion", cfg.exclusion},
              {"embed_dim", cfg.embed_dim},
              {"hidden_dim", cfg.hidden_dim},
              {"image_dim", cfg.image_dim},
              {"share_encoders", cfg.share_encoders},
              {"rerank_embed_dim", cfg.rerank_embed_dim},
              {"rerank_hidden_dim", cfg.rerank_hidden_dim},
              {"rerank_epochs", cfg.rerank_epochs},
              {"rerank_lr", cfg.rerank_lr},
              {"rerank_mode", cfg.rerank_mode},
              {"top_n", cfg.top_n}};
}

}  // namespace

void save_pipeline(const TrainedPipeline& p, const RunConfig& cfg, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const std::uint64_t fp = p.vocab.fingerprint();

  json model_meta = {{"kind", "model"},
                     {"vocab_fp", fp},
                     {"embed_dim", p.model.cfg.embed_dim},
                     {"hidden_dim", p.model.cfg.hidden_dim},
                     {"image_dim", p.model.cfg.image_dim},
                     {"fusion", fusion_to_string(p.model.cfg.fusion)},
                     {"share_encoders", p.model.cfg.share_encoders}};
  save_checkpoint(out_dir + "/model.ckpt", p.model.parameters(), model_meta);

  json rr_meta = {{"kind", "reranker"},
                  {"vocab_fp", fp},
                  {"embed_dim", p.reranker.config().embed_dim},
                  {"hidden_dim", p.reranker.config().hidden_dim}};
  save_checkpoint(out_dir + "/reranker.ckpt", p.reranker.parameters(), rr_meta);

  json epochs = json::array();
  for (const auto& m : p.epochs) {
    epochs.push_back({{"epoch", m.epoch},
                      {"steps_used", m.steps_used},
                      {"train_loss", m.train_loss},
                      {"dev_accuracy", m.dev_accuracy}});
  }
  json metrics = {{"config", config_echo(cfg)},
                  {"rerank_loss", p.rerank_loss},
                  {"epochs", epochs}};
  std::ofstream os(out_dir + "/metrics.json", std::ios::binary);
  if (!os) throw Error("save_pipeline: cannot open " + out_dir + "/metrics.json");
  os << metrics.dump(2) << "\n";
}

LoadedPipeline load_pipeline(const Corpus& corpus,
                             const std::vector<const std::vector<Question>*>& question_sets,
                             const std::string& dir, const RunConfig& cfg) {
  LoadedPipeline p{Vocab::build(corpus, question_sets), RerankerModel{}, MurkeModel{}};
  const std::uint64_t fp = p.vocab.fingerprint();
  Rng rng(cfg.seed);

  json rr_meta = read_checkpoint_meta(dir + "/reranker.ckpt");
  if (rr_meta.value("vocab_fp", 0ull) != fp)
    throw Error("load_pipeline: reranker checkpoint was trained on a different corpus/dataset");
  RerankerConfig rcfg{rr_meta["embed_dim"].get<std::size_t>(),
                      rr_meta["hidden_dim"].get<std::size_t>()};
  p.reranker = RerankerModel::init(p.vocab, rcfg, rng);
  load_checkpoint(dir + "/reranker.ckpt", p.reranker.parameters());

  json m_meta = read_checkpoint_meta(dir + "/model.ckpt");
  if (m_meta.value("vocab_fp", 0ull) != fp)
    throw Error("load_pipeline: model checkpoint was trained on a different corpus/dataset");
  ModelConfig mcfg;
  mcfg.embed_dim = m_meta["embed_dim"].get<std::size_t>();
  mcfg.hidden_dim = m_meta["hidden_dim"].get<std::size_t>();
  mcfg.image_dim = m_meta["image_dim"].get<std::size_t>();
  mcfg.fusion = fusion_from_string(m_meta["fusion"].get<std::string>());
  mcfg.share_encoders = m_meta["share_encoders"].get<bool>();
  p.model = MurkeModel::init(p.vocab, mcfg, rng);
  load_checkpoint(dir + "/model.ckpt", p.model.parameters());
  return p;
}

std::size_t load_embedding_file(const TensorPtr& table, const Vocab& vocab,
                                const std::string& path, std::size_t embed_dim) {
  std::ifstream is(path);
  if (!is) throw Error("load_embedding_file: cannot open " + path);
  std::string line;
  std::size_t applied = 0, line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string word;
    ss >> word;
    const int id = vocab.id(word);
    std::vector<double> vals;
    double v;
    while (ss >> v) vals.push_back(v);
    if (vals.size() != embed_dim)
      throw Error("load_embedding_file: line " + std::to_string(line_no) + " has " +
                  std::to_string(vals.size()) + " values, expected " +
                  std::to_string(embed_dim));
    if (id == Vocab::kUnk) continue;  // unknown words are skipped
    for (std::size_t j = 0; j < embed_dim; ++j)
      table->value[static_cast<std::size_t>(id) * embed_dim + j] = vals[j];
    ++applied;
  }
  return applied;
}

std::vector<GridRow> grid_search_steps(const Corpus& corpus, const std::vector<Question>& train,
                                       const std::vector<Question>& dev, const ChainMap& chains,
                                       const RunConfig& cfg, int t_min, int t_max) {
  if (t_min < 1 || t_max < t_min) throw Error("grid_search_steps: bad T range");
  std::vector<GridRow> rows(static_cast<std::size_t>(t_max - t_min + 1));
  std::vector<std::future<void>> futs;
  for (int t = t_min; t <= t_max; ++t) {
    futs.push_back(std::async(std::launch::async, [&, t] {
      RunConfig c = cfg;
      c.T = t;
      c.threads = 1;  // the grid itself is the parallel axis
      auto p = train_pipeline(corpus, train, dev, chains, c);
      auto prepared = prepare_questions(dev, corpus, p.reranker, c);
      ReasonOptions ropts{c.T, c.exclusion, false};
      const double acc = evaluate(p.model, prepared, ropts, 1).accuracy;
      rows[static_cast<std::size_t>(t - t_min)] = {t, acc};
    }));
  }
  for (auto& f : futs) f.get();
  return rows;
}

}  // namespace murke
