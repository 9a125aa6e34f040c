//! Seeded synthetic-corpus generator.
//!
//! Documents interleave person and object chains sentence by sentence, so a
//! pronoun's nearest candidate is frequently the *wrong* entity and surface
//! recency is a misleading cue. Persons are referred to by animate pronouns
//! and objects by inanimate ones; since pair-level features carry no animacy,
//! resolving these documents well requires cluster-level information, while
//! number agreement and distance remain learnable from pairs alone.
//!
//! Every rule sieve gets firing opportunities: repeated noun phrases (exact
//! match), org-name long/short forms (strict head), repeated family names
//! (proper name), city/“city X” pairs (location), title appositions (title),
//! demonstrative noun phrases (demonstrative), and reported speech (speaker).
//!
//! Consecutive mentions of one chain are never more than `max_chain_gap`
//! sentences apart, so every gold antecedent lies within the default
//! resolution window.

use crate::corpus::{parse_conll, Document};
use crate::embedding::EmbeddingTable;
use crate::error::{Error, Result};
use crate::lexicon::{
    FAMILY_NAMES, FEMININE_GIVEN_NAMES, MASCULINE_GIVEN_NAMES, TITLE_WORDS,
};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthSpec {
    /// Gold chains per document.
    pub entities: usize,
    /// Gold mentions per chain (appositions and reported speech may spend
    /// two at once).
    pub mentions_per_entity: usize,
    /// Chance that a non-initial mention is realized as a pronoun.
    pub pronoun_rate: f64,
    /// Approximate tokens per sentence (padded with adverbs).
    pub sentence_len_bounds: (usize, usize),
    /// Chance of an unannotated distractor noun phrase per sentence.
    pub distractor_rate: f64,
    /// Chance a non-initial person mention becomes reported speech.
    pub quote_rate: f64,
    /// Maximum sentence gap between consecutive mentions of one chain.
    pub max_chain_gap: usize,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            entities: 4,
            mentions_per_entity: 4,
            pronoun_rate: 0.45,
            sentence_len_bounds: (6, 12),
            distractor_rate: 0.3,
            quote_rate: 0.1,
            max_chain_gap: 3,
        }
    }
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        if self.entities == 0 {
            return Err(Error::InvalidSpec("zero entities".into()));
        }
        if self.mentions_per_entity == 0 {
            return Err(Error::InvalidSpec(
                "zero mentions per entity generates zero sentences".into(),
            ));
        }
        for (name, rate) in [
            ("pronoun_rate", self.pronoun_rate),
            ("distractor_rate", self.distractor_rate),
            ("quote_rate", self.quote_rate),
        ] {
            if !(0.0..=1.0).contains(&rate) {
                return Err(Error::InvalidSpec(format!("{name} {rate} outside [0, 1]")));
            }
        }
        let (lo, hi) = self.sentence_len_bounds;
        if lo == 0 || lo > hi {
            return Err(Error::InvalidSpec(format!(
                "bad sentence length bounds ({lo}, {hi})"
            )));
        }
        if self.max_chain_gap == 0 {
            return Err(Error::InvalidSpec("zero max_chain_gap".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenStats {
    pub documents: usize,
    pub sentences: usize,
    pub tokens: usize,
    pub pronouns: usize,
    pub chains: usize,
    pub gold_mentions: usize,
}

pub const OBJECT_NOUNS: &[&str] = &[
    "report", "book", "engine", "statue", "bridge", "painting", "letter",
    "budget", "contract", "garden", "machine", "festival", "museum",
    "library", "tunnel", "satellite", "archive", "manuscript", "sculpture",
    "orchard", "reactor", "telescope", "pipeline", "warehouse", "catalog",
    "monument", "journal", "treaty", "highway", "stadium", "laboratory",
    "document", "proposal", "portrait", "recipe", "vineyard", "workshop",
    "canal", "fountain", "exhibition",
];

pub const CITY_NAMES: &[&str] = &[
    "Tehran", "Shiraz", "Isfahan", "Tabriz", "Mashhad", "Yazd", "Kerman",
    "Qom", "Rasht", "Ahvaz",
];

const ORG_ADJECTIVES: &[&str] = &[
    "Azad", "Pars", "Alborz", "Caspian", "Eastern", "Northern", "Royal",
    "United",
];
const ORG_NOUNS: &[&str] = &["University", "Court", "Institute", "Council", "Academy", "Bank"];
const ORG_MIDDLES: &[&str] = &["National", "High", "Central"];

const DISTRACTOR_INANIMATE: &[&str] = &[
    "car", "tree", "house", "stone", "river", "cloud", "field", "tower",
    "lamp", "boat",
];
const DISTRACTOR_ANIMATE: &[&str] = &[
    "visitor", "neighbor", "student", "worker", "driver", "citizen",
    "tourist", "soldier", "dancer", "athlete",
];

const INTRANSITIVE_VERBS: &[&str] = &[
    "slept", "arrived", "smiled", "waited", "left", "nodded", "paused",
    "appeared",
];
const TRANSITIVE_VERBS: &[&str] = &[
    "saw", "praised", "described", "examined", "visited", "watched",
    "admired", "mentioned",
];
const QUOTE_VERBS_PAST: &[(&str, &str)] = &[
    ("said", "say"),
    ("announced", "announce"),
    ("stated", "state"),
    ("reported", "report"),
    ("added", "add"),
];
const WEATHER_VERBS: &[&str] = &["rained", "snowed"];
const ADVERBS: &[&str] = &[
    "yesterday", "today", "quietly", "slowly", "later", "again", "soon",
    "eagerly", "calmly", "briefly",
];

/// One emitted token with its annotation columns.
#[derive(Clone, Debug)]
struct Tok {
    form: String,
    lemma: String,
    fine: &'static str,
    ner: String,
    animacy: &'static str,
    chunk: String,
    gold: Option<(u32, u32)>, // (mention index, chain)
}

impl Tok {
    fn new(form: &str, fine: &'static str) -> Self {
        Tok {
            form: form.to_string(),
            lemma: form.to_lowercase(),
            fine,
            ner: "O".to_string(),
            animacy: "-",
            chunk: "-".to_string(),
            gold: None,
        }
    }

    fn coarse(&self) -> &'static str {
        if self.fine.starts_with("NN") {
            "N"
        } else if self.fine.starts_with("VB") {
            "V"
        } else if self.fine == "PRP" {
            "PRON"
        } else if self.fine == "DT" {
            "DET"
        } else if self.fine == "RB" {
            "ADV"
        } else {
            "PUNC"
        }
    }

    fn line(&self, doc_id: &str, sent: usize) -> String {
        let ner_coarse = match self.ner.split_once('-') {
            Some((_, ty)) => ty.to_string(),
            None => self.ner.clone(),
        };
        let (mention, chain) = match self.gold {
            Some((m, c)) => (m.to_string(), c.to_string()),
            None => ("-".to_string(), "-".to_string()),
        };
        [
            doc_id,
            &sent.to_string(),
            &self.form,
            self.coarse(),
            &self.ner,
            &self.lemma,
            &self.form,
            &ner_coarse,
            &mention,
            &chain,
            self.animacy,
            &self.chunk,
            self.fine,
        ]
        .join("\t")
    }
}

/// Tags every token of `np` as one chunk with the given role suffix.
fn mark_chunk(np: &mut [Tok], role: &str) {
    for (i, t) in np.iter_mut().enumerate() {
        t.chunk = format!("{}-NP{role}", if i == 0 { "B" } else { "I" });
    }
}

fn mark_ner(np: &mut [Tok], ty: &str) {
    for (i, t) in np.iter_mut().enumerate() {
        t.ner = format!("{}-{ty}", if i == 0 { "B" } else { "I" });
    }
}

fn mark_gold(np: &mut [Tok], chain: u32, idx: u32) {
    for t in np.iter_mut() {
        t.gold = Some((idx, chain));
    }
}

fn capitalize(word: &str) -> String {
    let mut cs = word.chars();
    match cs.next() {
        Some(first) => first.to_uppercase().collect::<String>() + cs.as_str(),
        None => String::new(),
    }
}

#[derive(Clone, Debug)]
enum Flavor {
    Person {
        given: String,
        family: String,
        title: String,
        pronoun: &'static str,
        reflexive: &'static str,
    },
    Object {
        noun: String,
        variant: String,
        plural: bool,
    },
    Location {
        city: String,
    },
    Org {
        adjective: String,
        noun: String,
        middle: String,
    },
}

#[derive(Clone, Debug)]
struct Plan {
    chain: u32,
    flavor: Flavor,
    /// Gold spans still to emit.
    remaining: usize,
    /// Gold spans emitted so far (also the next mention index).
    emitted: u32,
    last_sentence: Option<usize>,
    /// Objects switch to their variant surface form halfway through.
    use_variant: bool,
}

/// What one entity contributes to the sentence being built.
enum Realized {
    /// A noun phrase to place into a sentence frame.
    Np(Vec<Tok>),
    /// A self-contained sentence (reported speech, reflexive patterns).
    Sentence(Vec<Tok>),
}

struct DocGen<'a> {
    spec: &'a SynthSpec,
    rng: ChaCha20Rng,
    plans: Vec<Plan>,
    lines: Vec<String>,
    doc_id: String,
    sent: usize,
    distractors: Vec<(String, bool)>, // (noun, animate)
    next_distractor: usize,
}

impl<'a> DocGen<'a> {
    fn new(spec: &'a SynthSpec, doc_id: String, seed: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let plans = Self::make_plans(spec, &mut rng);
        let mut distractors: Vec<(String, bool)> = DISTRACTOR_INANIMATE
            .iter()
            .map(|n| (n.to_string(), false))
            .chain(DISTRACTOR_ANIMATE.iter().map(|n| (n.to_string(), true)))
            .collect();
        use rand::seq::SliceRandom;
        distractors.shuffle(&mut rng);
        DocGen {
            spec,
            rng,
            plans,
            lines: Vec::new(),
            doc_id,
            sent: 0,
            distractors,
            next_distractor: 0,
        }
    }

    fn make_plans(spec: &SynthSpec, rng: &mut ChaCha20Rng) -> Vec<Plan> {
        let mut titles: Vec<&str> = TITLE_WORDS.to_vec();
        let mut objects: Vec<&str> = OBJECT_NOUNS.to_vec();
        let mut cities: Vec<&str> = CITY_NAMES.to_vec();
        let mut adjectives: Vec<&str> = ORG_ADJECTIVES.to_vec();
        use rand::seq::SliceRandom;
        titles.shuffle(rng);
        objects.shuffle(rng);
        cities.shuffle(rng);
        adjectives.shuffle(rng);
        let mut plans = Vec::new();
        for e in 0..spec.entities {
            let flavor = match e % 6 {
                0 | 2 => {
                    let feminine = e % 6 == 0;
                    let pool = if feminine {
                        FEMININE_GIVEN_NAMES
                    } else {
                        MASCULINE_GIVEN_NAMES
                    };
                    Flavor::Person {
                        given: capitalize(pool[(e / 6) % pool.len()]),
                        family: capitalize(
                            FAMILY_NAMES[(e + rng.random_range(0..FAMILY_NAMES.len()))
                                % FAMILY_NAMES.len()],
                        ),
                        title: titles[e % titles.len()].to_string(),
                        pronoun: if feminine { "she" } else { "he" },
                        reflexive: if feminine { "herself" } else { "himself" },
                    }
                }
                1 | 3 => {
                    let plural = rng.random::<f64>() < 0.3;
                    Flavor::Object {
                        noun: objects[e % objects.len()].to_string(),
                        variant: objects[(e + spec.entities) % objects.len()].to_string(),
                        plural,
                    }
                }
                4 => Flavor::Location {
                    city: cities[(e / 6) % cities.len()].to_string(),
                },
                _ => Flavor::Org {
                    adjective: adjectives[(e / 6) % adjectives.len()].to_string(),
                    noun: ORG_NOUNS[(e / 6) % ORG_NOUNS.len()].to_string(),
                    middle: ORG_MIDDLES[(e / 6) % ORG_MIDDLES.len()].to_string(),
                },
            };
            plans.push(Plan {
                chain: e as u32 + 1,
                flavor,
                remaining: spec.mentions_per_entity,
                emitted: 0,
                last_sentence: None,
                use_variant: false,
            });
        }
        plans
    }

    fn next_distractor_np(&mut self) -> Vec<Tok> {
        let (noun, animate) =
            self.distractors[self.next_distractor % self.distractors.len()].clone();
        self.next_distractor += 1;
        let mut np = vec![Tok::new("the", "DT"), Tok::new(&noun, "NN")];
        if animate && self.rng.random::<f64>() < 0.4 {
            np[1].animacy = "animate";
        }
        np
    }

    /// The recurring (non-initial, non-pronoun) surface form of an entity.
    fn recurring_np(&mut self, p: usize) -> Vec<Tok> {
        let plan = self.plans[p].clone();
        match &plan.flavor {
            Flavor::Person {
                given,
                family,
                title,
                ..
            } => {
                let roll = self.rng.random::<f64>();
                if roll < 0.1 {
                    // Full name again: exact-match material.
                    let mut np = vec![Tok::new(given, "NNP"), Tok::new(family, "NNP")];
                    mark_ner(&mut np, "PER");
                    np
                } else if roll < 0.2 {
                    // Family name alone: proper-name-sieve material.
                    let mut np = vec![Tok::new(family, "NNP")];
                    mark_ner(&mut np, "PER");
                    np
                } else {
                    vec![Tok::new("the", "DT"), Tok::new(title, "NN")]
                }
            }
            Flavor::Object { noun, variant, plural } => {
                let base = if plan.use_variant { variant } else { noun };
                let (form, fine): (String, &'static str) = if *plural {
                    (format!("{base}s"), "NNS")
                } else {
                    (base.clone(), "NN")
                };
                let det = if self.rng.random::<f64>() < 0.2 {
                    if *plural {
                        "these"
                    } else {
                        "this"
                    }
                } else {
                    "the"
                };
                let mut np = vec![Tok::new(det, "DT"), Tok::new(&form, fine)];
                if *plural {
                    np[1].lemma = base.clone();
                }
                np
            }
            Flavor::Location { city } => {
                if self.plans[p].emitted == 1 {
                    // "X city" right after the bare name: location sieve.
                    let mut np = vec![Tok::new(city, "NNP"), Tok::new("city", "NN")];
                    mark_ner(&mut np, "LOC");
                    np
                } else {
                    let mut np = vec![Tok::new(city, "NNP")];
                    mark_ner(&mut np, "LOC");
                    np
                }
            }
            Flavor::Org {
                adjective,
                noun,
                middle,
            } => {
                if self.plans[p].emitted == 1 {
                    // Long form with an inner modifier: strict-head sieve.
                    let mut np = vec![
                        Tok::new(adjective, "NNP"),
                        Tok::new(middle, "NNP"),
                        Tok::new(noun, "NNP"),
                    ];
                    mark_ner(&mut np, "ORG");
                    np
                } else {
                    let mut np = vec![Tok::new(adjective, "NNP"), Tok::new(noun, "NNP")];
                    mark_ner(&mut np, "ORG");
                    np
                }
            }
        }
    }

    fn pronoun_np(&mut self, p: usize) -> Vec<Tok> {
        let form = match &self.plans[p].flavor {
            Flavor::Person { pronoun, .. } => pronoun,
            Flavor::Object { plural, .. } => {
                if *plural {
                    "they"
                } else {
                    "it"
                }
            }
            Flavor::Location { .. } | Flavor::Org { .. } => "it",
        };
        vec![Tok::new(form, "PRP")]
    }

    /// Emits the entity's next gold mention. `allow_special` permits
    /// whole-sentence realizations (quotes, reflexives).
    fn realize(&mut self, p: usize, allow_special: bool) -> Realized {
        let first = self.plans[p].emitted == 0;
        let remaining = self.plans[p].remaining;
        if first {
            return self.realize_intro(p);
        }
        // Objects may switch surface form for the second half of the chain.
        if let Flavor::Object { .. } = self.plans[p].flavor {
            if self.plans[p].emitted as usize * 2 >= self.spec.mentions_per_entity
                && !self.plans[p].use_variant
                && self.rng.random::<f64>() < 0.35
            {
                self.plans[p].use_variant = true;
            }
        }
        if allow_special && remaining >= 2 {
            if let Flavor::Person { reflexive, .. } = self.plans[p].flavor.clone() {
                let roll = self.rng.random::<f64>();
                if roll < self.spec.quote_rate {
                    return Realized::Sentence(self.quote_sentence(p));
                }
                if roll < self.spec.quote_rate + 0.12 {
                    return Realized::Sentence(self.reflexive_sentence(p, reflexive));
                }
            }
        }
        let np = if self.rng.random::<f64>() < self.spec.pronoun_rate {
            self.pronoun_np(p)
        } else {
            self.recurring_np(p)
        };
        Realized::Np(self.claim(p, np))
    }

    /// Assigns the next gold (mention index, chain) pair to an NP.
    fn claim(&mut self, p: usize, mut np: Vec<Tok>) -> Vec<Tok> {
        let plan = &mut self.plans[p];
        mark_gold(&mut np, plan.chain, plan.emitted);
        plan.emitted += 1;
        plan.remaining -= 1;
        np
    }

    fn realize_intro(&mut self, p: usize) -> Realized {
        match self.plans[p].flavor.clone() {
            Flavor::Person {
                given,
                family,
                title,
                ..
            } => {
                let mut name = vec![Tok::new(&given, "NNP"), Tok::new(&family, "NNP")];
                mark_ner(&mut name, "PER");
                let name = self.claim(p, name);
                if self.plans[p].remaining >= 1 {
                    // "Anna Karimi , the judge , spoke ." — the title sieve's
                    // apposition pattern; both spans join the gold chain.
                    let apposition =
                        self.claim(p, vec![Tok::new("the", "DT"), Tok::new(&title, "NN")]);
                    Realized::Sentence(self.apposition_sentence(name, apposition))
                } else {
                    Realized::Np(name)
                }
            }
            Flavor::Object { noun, plural, .. } => {
                let (form, fine): (String, &'static str) = if plural {
                    (format!("{noun}s"), "NNS")
                } else {
                    (noun.clone(), "NN")
                };
                let mut np = vec![Tok::new("the", "DT"), Tok::new(&form, fine)];
                // The annotation pipeline marked animacy here and nowhere
                // else; later mentions inherit it only through the cluster.
                np[1].animacy = "inanimate";
                if plural {
                    np[1].lemma = noun.clone();
                }
                Realized::Np(self.claim(p, np))
            }
            Flavor::Location { city } => {
                let mut np = vec![Tok::new(&city, "NNP")];
                mark_ner(&mut np, "LOC");
                Realized::Np(self.claim(p, np))
            }
            Flavor::Org {
                adjective, noun, ..
            } => {
                let mut np = vec![Tok::new(&adjective, "NNP"), Tok::new(&noun, "NNP")];
                mark_ner(&mut np, "ORG");
                Realized::Np(self.claim(p, np))
            }
        }
    }

    fn apposition_sentence(&mut self, mut name: Vec<Tok>, mut title: Vec<Tok>) -> Vec<Tok> {
        mark_chunk(&mut name, "-SBJ");
        mark_chunk(&mut title, "");
        let mut toks = name;
        toks.push(Tok::new(",", ","));
        toks.extend(title);
        toks.push(Tok::new(",", ","));
        toks.push(Tok::new(
            INTRANSITIVE_VERBS.choose(&mut self.rng).unwrap(),
            "VBD",
        ));
        toks
    }

    /// `" I <verb> " , said <recurring NP> .` — speaker-sieve material. Both
    /// the quoted pronoun and the speaker NP join the gold chain.
    fn quote_sentence(&mut self, p: usize) -> Vec<Tok> {
        let mut i_np = self.claim(p, vec![Tok::new("I", "PRP")]);
        mark_chunk(&mut i_np, "-SBJ");
        let speaker = self.recurring_np(p);
        let mut speaker = self.claim(p, speaker);
        mark_chunk(&mut speaker, "");
        let (verb_form, verb_lemma) = *QUOTE_VERBS_PAST.choose(&mut self.rng).unwrap();
        let mut said = Tok::new(verb_form, "VBD");
        said.lemma = verb_lemma.to_string();
        let mut toks = vec![Tok::new("\"", "``")];
        toks.extend(i_np);
        toks.push(Tok::new(
            INTRANSITIVE_VERBS.choose(&mut self.rng).unwrap(),
            "VBD",
        ));
        toks.push(Tok::new("\"", "''"));
        toks.push(Tok::new(",", ","));
        toks.push(said);
        toks.extend(speaker);
        toks
    }

    /// `<recurring NP> praised <reflexive> .`
    fn reflexive_sentence(&mut self, p: usize, reflexive: &str) -> Vec<Tok> {
        let subject = self.recurring_np(p);
        let mut subject = self.claim(p, subject);
        mark_chunk(&mut subject, "-SBJ");
        let mut refl = self.claim(p, vec![Tok::new(reflexive, "PRP")]);
        mark_chunk(&mut refl, "-OBJ");
        let mut toks = subject;
        toks.push(Tok::new(
            TRANSITIVE_VERBS.choose(&mut self.rng).unwrap(),
            "VBD",
        ));
        toks.extend(refl);
        toks
    }

    /// Frames one or two noun phrases into a clause, optionally adding an
    /// unannotated distractor.
    fn frame(&mut self, nps: Vec<Vec<Tok>>) -> Vec<Tok> {
        let mut toks = Vec::new();
        let mut nps = nps;
        if nps.len() == 2 {
            let mut subject = nps.remove(0);
            let mut object = nps.remove(0);
            mark_chunk(&mut subject, "-SBJ");
            mark_chunk(&mut object, "-OBJ");
            toks.extend(subject);
            toks.push(Tok::new(
                TRANSITIVE_VERBS.choose(&mut self.rng).unwrap(),
                "VBD",
            ));
            toks.extend(object);
        } else {
            let mut subject = nps.remove(0);
            mark_chunk(&mut subject, "-SBJ");
            toks.extend(subject);
            if self.rng.random::<f64>() < self.spec.distractor_rate {
                let mut object = self.next_distractor_np();
                mark_chunk(&mut object, "-OBJ");
                toks.push(Tok::new(
                    TRANSITIVE_VERBS.choose(&mut self.rng).unwrap(),
                    "VBD",
                ));
                toks.extend(object);
            } else {
                toks.push(Tok::new(
                    INTRANSITIVE_VERBS.choose(&mut self.rng).unwrap(),
                    "VBD",
                ));
            }
        }
        toks
    }

    /// A sentence with no gold mentions: a distractor clause or an
    /// expletive-pronoun weather clause.
    fn filler_sentence(&mut self) -> Vec<Tok> {
        if self.rng.random::<f64>() < 0.15 {
            let mut it = vec![Tok::new("it", "PRP")];
            mark_chunk(&mut it, "-SBJ");
            let mut toks = it;
            toks.push(Tok::new(WEATHER_VERBS.choose(&mut self.rng).unwrap(), "VBD"));
            toks
        } else {
            let mut np = self.next_distractor_np();
            mark_chunk(&mut np, "-SBJ");
            let mut toks = np;
            toks.push(Tok::new(
                INTRANSITIVE_VERBS.choose(&mut self.rng).unwrap(),
                "VBD",
            ));
            toks
        }
    }

    /// Pads with adverbs (inserted before the final period) to the sampled
    /// target length and closes the sentence.
    fn finish_sentence(&mut self, mut toks: Vec<Tok>) {
        let (lo, hi) = self.spec.sentence_len_bounds;
        let target = self.rng.random_range(lo..=hi);
        while toks.len() + 1 < target {
            toks.push(Tok::new(ADVERBS.choose(&mut self.rng).unwrap(), "RB"));
        }
        toks.push(Tok::new(".", "."));
        let sent = self.sent;
        if !self.lines.is_empty() {
            self.lines.push(String::new());
        }
        for t in &toks {
            self.lines.push(t.line(&self.doc_id, sent));
        }
        self.sent += 1;
    }

    /// Schedules all chains pair by pair, forcing a mention whenever an
    /// entity is about to exceed the chain-gap budget.
    fn run(mut self) -> String {
        let gap = self.spec.max_chain_gap;
        let mut queue: Vec<usize> = (0..self.plans.len()).collect();
        let mut active: Vec<usize> = Vec::new();
        loop {
            active.retain(|p| self.plans[*p].remaining > 0);
            while active.len() < 2 && !queue.is_empty() {
                active.push(queue.remove(0));
            }
            if active.is_empty() {
                break;
            }
            let s = self.sent;
            let forced: Vec<usize> = active
                .iter()
                .copied()
                .filter(|p| {
                    self.plans[*p]
                        .last_sentence
                        .is_some_and(|last| s - last >= gap)
                })
                .collect();
            let chosen: Vec<usize> = if !forced.is_empty() {
                forced
            } else {
                // A filler sentence is allowed only when no started chain
                // would overshoot its gap budget next sentence.
                let safe = active.iter().all(|p| {
                    self.plans[*p]
                        .last_sentence
                        .is_none_or(|last| s + 1 - last < gap)
                });
                if safe && self.rng.random::<f64>() < 0.15 {
                    let toks = self.filler_sentence();
                    self.finish_sentence(toks);
                    continue;
                }
                let both = active.len() == 2 && self.rng.random::<f64>() < 0.3;
                if both {
                    let mut pair = active.clone();
                    if self.rng.random::<f64>() < 0.5 {
                        pair.reverse();
                    }
                    pair
                } else {
                    let pick = active[self.rng.random_range(0..active.len())];
                    vec![pick]
                }
            };
            if chosen.len() == 2 {
                // Intro appositions own their sentence, so a pair involving
                // an unstarted person degrades to sequential sentences.
                match self.realize(chosen[0], false) {
                    Realized::Sentence(toks) => {
                        self.finish_sentence(toks);
                        self.plans[chosen[0]].last_sentence = Some(s);
                    }
                    Realized::Np(a) => match self.realize(chosen[1], false) {
                        Realized::Np(b) => {
                            let toks = self.frame(vec![a, b]);
                            self.finish_sentence(toks);
                            self.plans[chosen[0]].last_sentence = Some(s);
                            self.plans[chosen[1]].last_sentence = Some(s);
                        }
                        Realized::Sentence(toks) => {
                            let framed = self.frame(vec![a]);
                            self.finish_sentence(framed);
                            self.plans[chosen[0]].last_sentence = Some(s);
                            self.finish_sentence(toks);
                            self.plans[chosen[1]].last_sentence = Some(self.sent - 1);
                        }
                    },
                }
            } else {
                match self.realize(chosen[0], true) {
                    Realized::Np(np) => {
                        let toks = self.frame(vec![np]);
                        self.finish_sentence(toks);
                    }
                    Realized::Sentence(toks) => self.finish_sentence(toks),
                }
                self.plans[chosen[0]].last_sentence = Some(s);
            }
        }
        format!(
            "#begin document {}\n{}\n#end document\n",
            self.doc_id,
            self.lines.join("\n")
        )
    }
}

/// Generates one document. Equivalent to `gen_corpus(spec, 1, seed)`.
pub fn gen_synthetic(spec: &SynthSpec, seed: u64) -> Result<Document> {
    let (mut docs, _) = gen_corpus(spec, 1, seed)?;
    Ok(docs.remove(0))
}

/// Generates a corpus of `n_docs` documents, deterministically from `seed`.
pub fn gen_corpus(spec: &SynthSpec, n_docs: usize, seed: u64) -> Result<(Vec<Document>, GenStats)> {
    spec.validate()?;
    if n_docs == 0 {
        return Err(Error::InvalidSpec("zero documents".into()));
    }
    let mut master = ChaCha20Rng::seed_from_u64(seed);
    let mut docs = Vec::with_capacity(n_docs);
    for i in 0..n_docs {
        let doc_seed: u64 = master.random();
        let text = DocGen::new(spec, format!("synth-{i:04}"), doc_seed).run();
        let mut parsed = parse_conll(&text)?;
        docs.push(parsed.remove(0));
    }
    let mut stats = GenStats {
        documents: docs.len(),
        ..GenStats::default()
    };
    for d in &docs {
        stats.sentences += d.sentences.len();
        stats.tokens += d.token_count();
        stats.pronouns += d.tokens().filter(|t| t.pos_fine == "PRP").count();
        stats.chains += d.gold_chains.len();
        stats.gold_mentions += d.gold_chains.iter().map(|c| c.spans.len()).sum::<usize>();
    }
    Ok((docs, stats))
}

/// A deterministic embedding table over every form in `docs`: random unit
/// noise plus a class offset separating animate from inanimate vocabulary.
pub fn synthetic_embeddings(docs: &[Document], dim: usize, seed: u64) -> Result<EmbeddingTable> {
    if dim == 0 {
        return Err(Error::InvalidSpec("zero embedding dimension".into()));
    }
    let mut forms: Vec<String> = docs
        .iter()
        .flat_map(|d| d.tokens())
        .map(|t| t.form.clone())
        .collect();
    forms.sort();
    forms.dedup();
    let animate: Vec<&str> = TITLE_WORDS
        .iter()
        .chain(FEMININE_GIVEN_NAMES)
        .chain(MASCULINE_GIVEN_NAMES)
        .chain(FAMILY_NAMES)
        .chain(DISTRACTOR_ANIMATE)
        .copied()
        .collect();
    let pairs: Vec<(String, Vec<f64>)> = forms
        .into_iter()
        .enumerate()
        .map(|(i, form)| {
            let mut rng = ChaCha20Rng::seed_from_u64(
                seed ^ (i as u64 + 1).wrapping_mul(0x9e3779b97f4a7c15),
            );
            let mut v: Vec<f64> = (0..dim).map(|_| rng.random::<f64>() - 0.5).collect();
            let lower = form.to_lowercase();
            if animate.contains(&lower.as_str()) {
                v[0] += 2.0;
            } else if OBJECT_NOUNS.contains(&lower.as_str())
                || DISTRACTOR_INANIMATE.contains(&lower.as_str())
            {
                v[0] -= 2.0;
            }
            (form, v)
        })
        .collect();
    EmbeddingTable::from_pairs(pairs, dim, crate::embedding::OovPolicy::ZeroVector)
}
