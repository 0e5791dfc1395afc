// Copyright 2026 The sfar Authors
// SPDX-License-Identifier: Apache-2.0

#include "sfar/synthetic.hpp"

#include <algorithm>
#include <random>

namespace sfar {

namespace {

struct Category {
  const char* trait;  // "{}" marks the value
  std::vector<const char*> values;
  std::vector<const char*> questions;
  std::vector<const char*> answers;
};

const std::vector<Category>& categories() {
  static const std::vector<Category> cats = {
      {"i have a {} .",
       {"dog", "cat", "parrot", "hamster", "rabbit", "turtle", "snake", "horse"},
       {"do you have any pets ?", "any animals at home ?"},
       {"yes , i have a {} .", "i have a {} at home .", "i do , a {} ."}},
      {"my favorite food is {} .",
       {"pizza", "sushi", "tacos", "papaya", "pasta", "curry", "steak", "salad", "noodles", "burgers"},
       {"what do you like to eat ?", "what is your favorite food ?"},
       {"i love {} .", "{} is my favorite food .", "i eat {} every day ."}},
      {"i work as a {} .",
       {"nurse", "teacher", "farmer", "chef", "pilot", "lawyer", "plumber", "baker", "dentist", "writer"},
       {"what do you do for a living ?", "what is your job ?"},
       {"i work as a {} .", "i am a {} .", "i am a {} , it is hard work ."}},
      {"i live in {} .",
       {"paris", "tokyo", "boston", "denver", "london", "chicago", "seattle", "miami", "dallas", "berlin"},
       {"where do you live ?", "where are you from ?"},
       {"i live in {} .", "i am from {} .", "{} , it is a nice city ."}},
      {"i enjoy {} .",
       {"hiking", "swimming", "tennis", "soccer", "running", "cycling", "golf", "surfing"},
       {"what do you do for fun ?", "any hobbies ?"},
       {"i enjoy {} .", "i love {} on weekends .", "{} , mostly ."}},
      {"i drive a {} .",
       {"truck", "jeep", "van", "tesla", "toyota", "honda", "mustang", "minivan"},
       {"what car do you drive ?", "do you drive ?"},
       {"i drive a {} .", "yes , a {} .", "i have a {} ."}},
      {"my favorite color is {} .",
       {"blue", "red", "green", "purple", "yellow", "orange", "pink", "black"},
       {"what is your favorite color ?", "do you like colors ?"},
       {"i like {} .", "{} is my favorite color .", "i love {} ."}},
      {"i play the {} .",
       {"guitar", "piano", "violin", "drums", "flute", "cello"},
       {"do you play music ?", "can you play anything ?"},
       {"i play the {} .", "yes , the {} .", "i play the {} every day ."}},
  };
  return cats;
}

// Words the partner mentions and the agent may echo back.
const std::vector<const char*>& topics() {
  static const std::vector<const char*> t = {
      "beach", "movies", "concert", "museum", "zoo",    "park",   "lake",  "mountains", "wedding", "party",
      "gym",   "library", "mall",   "school", "office", "market", "church", "stadium",  "desert",  "island"};
  return t;
}

std::string fill(const char* tmpl, const std::string& value) {
  std::string s(tmpl);
  const auto pos = s.find("{}");
  if (pos != std::string::npos) s.replace(pos, 2, value);
  return s;
}

template <class T>
const T& pick(const std::vector<T>& v, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> d(0, v.size() - 1);
  return v[d(rng)];
}

struct Persona {
  std::vector<std::size_t> cats;
  std::vector<std::string> values;
  std::vector<std::string> traits;
};

Persona make_persona(std::mt19937_64& rng) {
  const auto& cats = categories();
  std::vector<std::size_t> idx(cats.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::shuffle(idx.begin(), idx.end(), rng);
  std::uniform_int_distribution<int> n_traits(4, 5);
  idx.resize(static_cast<std::size_t>(n_traits(rng)));
  Persona p;
  for (std::size_t c : idx) {
    p.cats.push_back(c);
    p.values.push_back(pick(cats[c].values, rng));
    p.traits.push_back(fill(cats[c].trait, p.values.back()));
  }
  return p;
}

}  // namespace

std::vector<std::string> synthetic_persona(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return make_persona(rng).traits;
}

std::vector<DialogueRecord> synthetic_dialogues(std::size_t examples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.5);
  const auto& cats = categories();
  std::vector<DialogueRecord> out;
  while (out.size() < examples) {
    const Persona persona = make_persona(rng);
    std::vector<std::string> history;
    std::vector<std::size_t> asked(persona.cats.size());
    for (std::size_t i = 0; i < asked.size(); ++i) asked[i] = i;
    std::shuffle(asked.begin(), asked.end(), rng);
    std::uniform_int_distribution<std::size_t> n_turns(2, std::min<std::size_t>(4, asked.size()));
    const std::size_t turns = n_turns(rng);

    for (std::size_t t = 0; t < turns && out.size() < examples; ++t) {
      const std::size_t k = asked[t];
      const Category& cat = cats[persona.cats[k]];
      const std::string topic = pick(topics(), rng);
      const bool echo = coin(rng);
      std::string human;
      if (t == 0) human = "hi ! ";
      if (echo) human += "i just got back from the " + topic + " . ";
      human += pick(cat.questions, rng);

      std::string reply;
      if (echo) reply = coin(rng) ? "the " + topic + " sounds fun . " : "i miss the " + topic + " . ";
      reply += fill(pick(cat.answers, rng), persona.values[k]);
      if (t + 1 < turns && coin(rng)) reply += " and you ?";

      history.push_back(human);
      out.push_back({persona.traits, history, reply});
      history.push_back(reply);
    }
  }
  return out;
}

}  // namespace sfar
