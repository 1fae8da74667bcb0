// include/scriptkit/knowledge.hpp

// Copyright 2026  Scriptkit Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.
//
// Expert-identity prompt construction and parsing of LLM answers into an
// ordered list of instructional steps.

#ifndef SCRIPTKIT_KNOWLEDGE_HPP_
#define SCRIPTKIT_KNOWLEDGE_HPP_

#include <fstream>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "scriptkit/common.hpp"

namespace scriptkit {

/// One worked question/answer pair shown to the LLM before the real question.
struct PromptExemplar {
  std::string question;                 // e.g. "How to water a cactus?"
  std::vector<std::string> answer_steps;
};

/// The prompt layout: an expert-identity line, exactly two exemplars, and a
/// question format holding a single {goal} placeholder.
struct PromptTemplate {
  std::string identity_line;
  std::vector<PromptExemplar> exemplars;
  std::string question_format;  // contains "{goal}" exactly once

  void validate() const {
    if (identity_line.empty()) throw Error("prompt", "template identity line is empty");
    if (exemplars.size() != 2) {
      throw Error("prompt", "template must carry exactly 2 exemplars, got " +
                                std::to_string(exemplars.size()));
    }
    for (const auto &ex : exemplars) {
      if (ex.question.empty() || ex.answer_steps.empty()) {
        throw Error("prompt", "template exemplar is incomplete");
      }
    }
    auto first = question_format.find("{goal}");
    if (first == std::string::npos || question_format.find("{goal}", first + 1) != std::string::npos) {
      throw Error("prompt", "question format must contain {goal} exactly once");
    }
  }
};

/// Renders the question line for a goal ("Question: <format with goal>").
inline std::string render_question(const PromptTemplate &tmpl, const std::string &goal) {
  std::string q = tmpl.question_format;
  q.replace(q.find("{goal}"), 6, goal);
  return q;
}

/// Byte-deterministic prompt: identity line, the two exemplar Q/A blocks,
/// then the goal question with an empty answer slot.
inline std::string build_prompt(const std::string &goal, const PromptTemplate &tmpl) {
  tmpl.validate();
  if (trim(goal).empty()) throw Error("prompt", "goal is empty");
  if (goal.find('\n') != std::string::npos || goal.find('\r') != std::string::npos) {
    throw Error("prompt", "goal must not contain line breaks");
  }
  std::ostringstream out;
  out << tmpl.identity_line << "\n";
  for (const auto &ex : tmpl.exemplars) {
    out << "\nQuestion: " << ex.question << "\nAnswer:\n";
    for (std::size_t i = 0; i < ex.answer_steps.size(); ++i) {
      out << (i + 1) << ". " << ex.answer_steps[i] << "\n";
    }
  }
  out << "\nQuestion: " << render_question(tmpl, goal) << "\nAnswer:\n";
  return out.str();
}

/// Template asset format: identity line first, then "Question:"/"Answer:"
/// blocks with numbered steps; the final block's question carries {goal} and
/// has no answer lines.
inline PromptTemplate parse_prompt_template(const std::string &text) {
  PromptTemplate tmpl;
  std::istringstream in(text);
  std::string line;
  PromptExemplar current;
  bool have_question = false;
  auto flush = [&]() {
    if (!have_question) return;
    if (current.question.find("{goal}") != std::string::npos) {
      tmpl.question_format = current.question;
    } else {
      tmpl.exemplars.push_back(current);
    }
    current = PromptExemplar{};
    have_question = false;
  };
  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (t.empty()) continue;
    if (t.rfind("Question:", 0) == 0) {
      flush();
      current.question = trim(t.substr(9));
      have_question = true;
    } else if (t.rfind("Answer:", 0) == 0) {
      continue;
    } else if (have_question) {
      static const std::regex numbered(R"(^\s*(\d+)[\.\)]\s+(.*)$)");
      std::smatch m;
      if (std::regex_match(t, m, numbered)) {
        current.answer_steps.push_back(trim(m[2].str()));
      } else {
        current.answer_steps.push_back(t);
      }
    } else if (tmpl.identity_line.empty()) {
      tmpl.identity_line = t;
    }
  }
  flush();
  tmpl.validate();
  return tmpl;
}

inline PromptTemplate load_prompt_template(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error("prompt", "cannot open template " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_prompt_template(buf.str());
}

/// Built-in default template, identical to assets/prompt_template.txt.
inline PromptTemplate default_prompt_template() {
  PromptTemplate tmpl;
  tmpl.identity_line = "Imagine you are an expert on daily life tasks.";
  tmpl.exemplars.push_back(PromptExemplar{
      "How to make a toast in an oven?",
      {"Preheat the oven.", "Put the bread on a sheet and heat it.", "Flip the toast over.",
       "Take the toast out and butter it."}});
  tmpl.exemplars.push_back(PromptExemplar{
      "How to water a cactus?",
      {"Check that the soil is dry.", "Pour water slowly around the base.", "Let the pot drain fully."}});
  tmpl.question_format = "How to {goal}?";
  return tmpl;
}

/// The instructional step list prompted from an LLM for one task goal.
struct InstructionalKnowledge {
  std::vector<std::string> steps;
  std::string raw;
};

/// Extracts numbered lines ("1. ..." / "2) ...") in order; numbering gaps are
/// ignored since steps are positional. When nothing is numbered, nonempty
/// lines are used instead. Returns nullopt when no step can be recovered;
/// callers treat that as "no knowledge" and force the confidence to zero.
inline std::optional<InstructionalKnowledge> parse_instructions(const std::string &raw,
                                                                std::size_t max_steps = 30) {
  InstructionalKnowledge out;
  out.raw = raw;
  static const std::regex numbered(R"(^\s*(\d+)[\.\)]\s+(.*)$)");
  std::istringstream in(raw);
  std::string line;
  std::vector<std::string> fallback;
  while (std::getline(in, line)) {
    std::smatch m;
    if (std::regex_match(line, m, numbered)) {
      std::string step = trim(m[2].str());
      if (!step.empty()) out.steps.push_back(std::move(step));
    } else {
      std::string t = trim(line);
      if (!t.empty()) fallback.push_back(std::move(t));
    }
  }
  if (out.steps.empty()) out.steps = std::move(fallback);
  if (out.steps.empty()) return std::nullopt;
  if (out.steps.size() > max_steps) out.steps.resize(max_steps);
  return out;
}

}  // namespace scriptkit

#endif  // SCRIPTKIT_KNOWLEDGE_HPP_
