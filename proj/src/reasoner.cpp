#include "murke/reasoner.hpp"

#include <algorithm>
#include <fstream>
#include <future>
#include <numeric>

#include "json.hpp"

using nlohmann::json;

namespace murke {

namespace {

std::string join_tokens(const std::vector<std::string>& tokens, std::size_t lo, std::size_t hi) {
  std::string out;
  for (std::size_t i = lo; i <= hi && i < tokens.size(); ++i) {
    if (!out.empty()) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

std::vector<std::pair<std::size_t, double>> top_gamma(const std::vector<double>& gamma,
                                                      std::size_t n) {
  std::vector<std::size_t> idx(gamma.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return gamma[a] > gamma[b]; });
  std::vector<std::pair<std::size_t, double>> out;
  for (std::size_t i = 0; i < idx.size() && i < n; ++i) out.push_back({idx[i], gamma[idx[i]]});
  return out;
}

}  // namespace

ReasonerOutput reason(const MurkeModel& model, const Question& question,
                      const std::vector<const Document*>& dn, const ReasonOptions& opts) {
  if (dn.empty()) throw Error("reason: empty supporting document set");
  if (opts.steps < 1) throw Error("reason: steps must be >= 1");

  // document encodings are computed once and reused across steps
  std::vector<EncodedDoc> docs;
  docs.reserve(dn.size());
  for (const Document* d : dn) docs.push_back(encode_document(model, *d));

  auto e_q = encode_question(model, question.tokens);
  const FusionMode mode = question.image_vec.empty() ? FusionMode::kNone : model.cfg.fusion;
  QuestionState state = init_question_state(model, e_q, question.image_vec, mode);

  ReasonerOutput out;
  int steps = opts.steps;
  if (opts.exclude_previous && static_cast<std::size_t>(steps) > dn.size()) {
    steps = static_cast<int>(dn.size());
    out.truncated = true;
  }

  std::set<std::string> used;
  std::vector<std::vector<double>> step_scores;
  for (int t = 0; t < steps; ++t) {
    const std::size_t chosen = select_top1(state, docs, used);
    const EncodedDoc& doc = docs[chosen];
    if (opts.exclude_previous) used.insert(doc.doc_id);

    // reformulation and entailment both read (U^t, V^t); they are
    // independent and may run concurrently with identical results
    ReformulationResult ref;
    TensorPtr scores;
    if (opts.parallel_step) {
      auto ref_fut = std::async(std::launch::async,
                                [&] { return reformulate(model, state, doc.enc); });
      auto ent_fut = std::async(std::launch::async, [&] {
        return entail_all(model, doc.enc, state, question.option_tokens);
      });
      ref = ref_fut.get();
      scores = ent_fut.get();
    } else {
      ref = reformulate(model, state, doc.enc);
      scores = entail_all(model, doc.enc, state, question.option_tokens);
    }

    StepTrace trace;
    trace.step = t;
    trace.doc_id = doc.doc_id;
    trace.p_s = ref.spans.p_s->value;
    trace.p_e = ref.spans.p_e->value;
    trace.gamma = ref.gamma->value;
    trace.span_start = ref.span.first;
    trace.span_end = ref.span.second;
    trace.span_text = join_tokens(dn[chosen]->tokens, trace.span_start, trace.span_end);
    trace.choice_scores = scores->value;
    out.traces.push_back(std::move(trace));

    out.step_score_nodes.push_back(scores);
    step_scores.push_back(scores->value);
    state = ref.next;
  }

  out.final_node = aggregate_node(out.step_score_nodes);
  out.final_scores = out.final_node->value;
  out.predicted_index = predict(out.final_scores);
  return out;
}

std::vector<double> aggregate_scores(const std::vector<std::vector<double>>& step_scores) {
  if (step_scores.empty()) throw Error("aggregate_scores: no steps");
  std::vector<double> out(step_scores[0].size(), 0.0);
  for (const auto& s : step_scores) {
    if (s.size() != out.size()) throw Error("aggregate_scores: inconsistent step widths");
    for (std::size_t i = 0; i < s.size(); ++i) out[i] += s[i];
  }
  for (auto& v : out) v /= static_cast<double>(step_scores.size());
  return out;
}

TensorPtr aggregate_node(const std::vector<TensorPtr>& step_scores) {
  if (step_scores.empty()) throw Error("aggregate_node: no steps");
  TensorPtr acc = step_scores[0];
  for (std::size_t t = 1; t < step_scores.size(); ++t) acc = add(acc, step_scores[t]);
  return scale(acc, 1.0 / static_cast<double>(step_scores.size()));
}

TensorPtr loss_node(const std::vector<TensorPtr>& step_scores, int gold_index) {
  auto agg = aggregate_node(step_scores);
  if (gold_index < 0 || static_cast<std::size_t>(gold_index) >= agg->size())
    throw Error("loss_node: gold index " + std::to_string(gold_index) + " out of range");
  return scale(log_clamped(pick(agg, static_cast<std::size_t>(gold_index)), 1e-12), -1.0);
}

int predict(const std::vector<double>& final_scores) {
  if (final_scores.empty()) throw Error("predict: empty scores");
  std::size_t best = 0;
  for (std::size_t i = 1; i < final_scores.size(); ++i) {
    if (final_scores[i] > final_scores[best]) best = i;
  }
  return static_cast<int>(best);
}

void export_trace(const ReasonerOutput& output, const Question& question,
                  const std::string& path) {
  json steps = json::array();
  for (const auto& t : output.traces) {
    json tg = json::array();
    for (const auto& [i, v] : top_gamma(t.gamma, 10)) tg.push_back({i, v});
    steps.push_back({{"step", t.step},
                     {"doc_id", t.doc_id},
                     {"span", {t.span_start, t.span_end}},
                     {"span_text", t.span_text},
                     {"p_s", t.p_s},
                     {"p_e", t.p_e},
                     {"gamma", t.gamma},
                     {"top_gamma", tg},
                     {"choice_scores", t.choice_scores}});
  }
  json doc = {{"qid", question.qid},
              {"question", question.text},
              {"options", question.option_texts},
              {"steps", steps},
              {"final_scores", output.final_scores},
              {"predicted_index", output.predicted_index},
              {"predicted_text", question.option_texts[output.predicted_index]},
              {"truncated", output.truncated}};
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("export_trace: cannot open " + path);
  os << doc.dump(2) << "\n";
  if (!os) throw Error("export_trace: write failed for " + path);
}

// ---- training / evaluation -----------------------------------------------------

std::vector<EpochMetric> train_model(MurkeModel& model, const std::vector<PreparedQuestion>& train,
                                     const std::vector<PreparedQuestion>& dev,
                                     const TrainOptions& opts) {
  if (train.empty()) throw Error("train_model: empty training set");
  for (const auto& pq : train) {
    if (!pq.question->answer_idx)
      throw Error("train_model: question " + pq.question->qid + " lacks a gold label");
  }

  auto params = tensors_of(model.parameters());
  SgdSchedule sched{opts.lr, opts.decay, 0};
  std::mt19937_64 shuffle_rng(opts.shuffle_seed);

  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);

  std::vector<EpochMetric> metrics;
  for (int epoch = 0; epoch < opts.epochs; ++epoch) {
    const int steps_now = (opts.steps > 1 && epoch < opts.stage1_epochs) ? 1 : opts.steps;
    ReasonOptions ropts{steps_now, opts.exclude_previous, opts.parallel_step};

    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double total_loss = 0.0;
    for (std::size_t qi : order) {
      const PreparedQuestion& pq = train[qi];
      zero_grads(params);
      auto out = reason(model, *pq.question, pq.dn, ropts);
      auto loss = loss_node(out.step_score_nodes, *pq.question->answer_idx);
      total_loss += loss->value[0];
      if (opts.lr > 0.0) {
        backward(loss);
        sgd_step(params, sched);
      }
    }
    sched.epoch = epoch + 1;

    EpochMetric m;
    m.epoch = epoch;
    m.steps_used = steps_now;
    m.train_loss = total_loss / static_cast<double>(train.size());
    if (!dev.empty()) {
      ReasonOptions eval_opts{opts.steps, opts.exclude_previous, false};
      m.dev_accuracy = evaluate(model, dev, eval_opts, opts.threads).accuracy;
    }
    metrics.push_back(m);
  }
  return metrics;
}

EvalResult evaluate(const MurkeModel& model, const std::vector<PreparedQuestion>& questions,
                    const ReasonOptions& opts, unsigned threads, bool keep_outputs) {
  if (questions.empty()) throw Error("evaluate: empty dataset");
  for (const auto& pq : questions) {
    if (!pq.question->answer_idx)
      throw Error("evaluate: question " + pq.question->qid + " lacks a gold label");
  }

  EvalResult res;
  res.predictions.assign(questions.size(), -1);
  std::vector<ReasonerOutput> outputs(questions.size());
  parallel_for(
      questions.size(),
      [&](std::size_t i) {
        NoGradGuard ng;
        auto out = reason(model, *questions[i].question, questions[i].dn, opts);
        res.predictions[i] = out.predicted_index;
        if (keep_outputs) outputs[i] = std::move(out);
      },
      threads);

  std::size_t right = 0;
  for (std::size_t i = 0; i < questions.size(); ++i) {
    const Question& q = *questions[i].question;
    CategoryMetric& cm = res.by_category[q.category];
    ++cm.total;
    if (res.predictions[i] == *q.answer_idx) {
      ++right;
      ++cm.correct;
      cm.points += 3;
    } else {
      cm.points -= 1;
    }
  }
  res.accuracy = static_cast<double>(right) / static_cast<double>(questions.size());
  res.points = 3 * static_cast<long>(right) -
               static_cast<long>(questions.size() - right);
  if (keep_outputs) res.outputs = std::move(outputs);
  return res;
}

}  // namespace murke
