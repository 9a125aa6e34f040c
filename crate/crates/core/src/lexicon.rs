//! Static lexical resources consumed by mention detection and the sieves.
//!
//! A lexicon directory holds one file per resource:
//!
//! * `pronouns.lex` — pronoun forms with class/number/person/animacy fields
//! * `quote_verbs.lex` — lemmas of reporting verbs ("say", "announce", ...)
//! * `titles.lex` — role/title nouns ("president", "judge", ...)
//! * `names.lex` — given/family names, optionally with a gender field
//! * `demonstratives.lex` — determiners that open a demonstrative phrase
//! * `speech_pronouns.lex` — pronoun forms typical of quoted speech
//!
//! Each line is `form<TAB>field=value;field=value` (the field part may be
//! absent). Lines starting with `#` and blank lines are skipped. Lookups are
//! case-insensitive: forms are folded to lowercase on load and on query.

use crate::attrs::{
    AnimacyValue, AttributeLattice, GenderValue, NumberValue, PersonValue, ValueSet,
};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

/// Pronoun classes relevant to resolution behaviour.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PronounClass {
    Personal,
    Demonstrative,
    Reflexive,
}

impl PronounClass {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "personal" => Ok(Self::Personal),
            "demonstrative" | "dem" => Ok(Self::Demonstrative),
            "reflexive" | "refl" => Ok(Self::Reflexive),
            other => Err(Error::Lexicon(format!("unknown pronoun class {other:?}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Personal => "personal",
            Self::Demonstrative => "demonstrative",
            Self::Reflexive => "reflexive",
        }
    }
}

/// One pronoun table entry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PronounEntry {
    pub class: PronounClass,
    pub number: ValueSet<NumberValue>,
    pub person: ValueSet<PersonValue>,
    pub animacy: ValueSet<AnimacyValue>,
}

impl PronounEntry {
    pub fn attributes(&self) -> AttributeLattice {
        AttributeLattice {
            number: self.number,
            person: self.person,
            animacy: self.animacy,
            gender: ValueSet::empty(),
        }
    }
}

/// All static resources bundled together.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Lexicons {
    pub pronouns: BTreeMap<String, PronounEntry>,
    pub quote_verbs: BTreeSet<String>,
    pub titles: BTreeSet<String>,
    /// name -> gender evidence (may be empty for e.g. family names)
    pub names: BTreeMap<String, ValueSet<GenderValue>>,
    pub demonstratives: BTreeSet<String>,
    pub speech_pronouns: BTreeSet<String>,
}

/// Word pools shared by the miniature lexicon and the corpus generator.
pub const QUOTE_VERB_LEMMAS: &[&str] = &["say", "tell", "announce", "state", "report", "add"];

pub const TITLE_WORDS: &[&str] = &[
    "president", "minister", "professor", "doctor", "judge", "coach",
    "director", "mayor", "chairman", "spokesman", "engineer", "lawyer",
    "teacher", "journalist", "manager", "nurse", "pilot", "farmer", "author",
    "singer", "actor", "painter", "architect", "chef", "guard", "clerk",
    "dean", "editor", "broker", "surgeon", "analyst", "designer", "officer",
    "scientist", "senator", "sheriff", "tailor", "trainer", "tutor",
    "scholar",
];

pub const FEMININE_GIVEN_NAMES: &[&str] = &[
    "anna", "sara", "maryam", "lina", "nora", "parisa", "leila", "mina",
];

pub const MASCULINE_GIVEN_NAMES: &[&str] = &[
    "david", "omid", "reza", "kaveh", "farid", "arash", "babak", "sina",
];

pub const FAMILY_NAMES: &[&str] = &[
    "karimi", "ahmadi", "moradi", "hosseini", "rahimi", "jafari", "kazemi",
    "sadeghi", "azizi", "naderi",
];

impl Lexicons {
    pub fn pronoun(&self, form: &str) -> Option<&PronounEntry> {
        self.pronouns.get(&form.to_lowercase())
    }

    pub fn is_quote_verb(&self, lemma: &str) -> bool {
        self.quote_verbs.contains(&lemma.to_lowercase())
    }

    pub fn is_title(&self, form: &str) -> bool {
        self.titles.contains(&form.to_lowercase())
    }

    pub fn name_gender(&self, form: &str) -> Option<ValueSet<GenderValue>> {
        self.names.get(&form.to_lowercase()).copied()
    }

    pub fn is_demonstrative_marker(&self, form: &str) -> bool {
        self.demonstratives.contains(&form.to_lowercase())
    }

    pub fn is_speech_pronoun(&self, form: &str) -> bool {
        self.speech_pronouns.contains(&form.to_lowercase())
    }

    /// Loads all resource files from a directory. `pronouns.lex` is
    /// mandatory (nothing can be resolved without it); the rest default to
    /// empty when absent.
    pub fn load_dir(dir: &Path) -> Result<Self> {
        let pronoun_path = dir.join("pronouns.lex");
        if !pronoun_path.exists() {
            return Err(Error::Lexicon(format!(
                "missing {} (the pronoun table is required)",
                pronoun_path.display()
            )));
        }
        let mut lex = Lexicons::default();
        for (form, fields) in read_lex_file(&pronoun_path)? {
            lex.pronouns.insert(form, parse_pronoun_fields(&fields)?);
        }
        if lex.pronouns.is_empty() {
            return Err(Error::Lexicon("pronoun table is empty".into()));
        }
        for (form, _) in read_opt(dir, "quote_verbs.lex")? {
            lex.quote_verbs.insert(form);
        }
        for (form, _) in read_opt(dir, "titles.lex")? {
            lex.titles.insert(form);
        }
        for (form, fields) in read_opt(dir, "names.lex")? {
            let mut gender = ValueSet::empty();
            for (k, v) in &fields {
                if k == "gender" {
                    for part in v.split(',') {
                        gender.insert(parse_gender(part)?);
                    }
                }
            }
            lex.names.insert(form, gender);
        }
        for (form, _) in read_opt(dir, "demonstratives.lex")? {
            lex.demonstratives.insert(form);
        }
        for (form, _) in read_opt(dir, "speech_pronouns.lex")? {
            lex.speech_pronouns.insert(form);
        }
        Ok(lex)
    }

    /// Writes the resources to a directory in the format `load_dir` reads.
    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let mut pronouns = String::new();
        for (form, e) in &self.pronouns {
            let number = join_values(e.number.iter().map(number_name));
            let person = join_values(e.person.iter().map(person_name));
            let animacy = join_values(e.animacy.iter().map(animacy_name));
            let mut fields = vec![format!("class={}", e.class.name())];
            if !number.is_empty() {
                fields.push(format!("number={number}"));
            }
            if !person.is_empty() {
                fields.push(format!("person={person}"));
            }
            if !animacy.is_empty() {
                fields.push(format!("animacy={animacy}"));
            }
            pronouns.push_str(&format!("{form}\t{}\n", fields.join(";")));
        }
        std::fs::write(dir.join("pronouns.lex"), pronouns)?;

        let plain = |set: &BTreeSet<String>| {
            set.iter().map(|f| format!("{f}\n")).collect::<String>()
        };
        std::fs::write(dir.join("quote_verbs.lex"), plain(&self.quote_verbs))?;
        std::fs::write(dir.join("titles.lex"), plain(&self.titles))?;
        std::fs::write(dir.join("demonstratives.lex"), plain(&self.demonstratives))?;
        std::fs::write(dir.join("speech_pronouns.lex"), plain(&self.speech_pronouns))?;

        let mut names = String::new();
        for (form, gender) in &self.names {
            if gender.is_empty() {
                names.push_str(&format!("{form}\n"));
            } else {
                let g = join_values(gender.iter().map(gender_name));
                names.push_str(&format!("{form}\tgender={g}\n"));
            }
        }
        std::fs::write(dir.join("names.lex"), names)?;
        Ok(())
    }

    /// A small built-in English lexicon, enough for the synthetic corpus
    /// and for tests. Real deployments load a directory instead.
    pub fn miniature_english() -> Self {
        let mut lex = Lexicons::default();
        let p = |class, number: &[NumberValue], person: &[PersonValue], animacy: &[AnimacyValue]| {
            PronounEntry {
                class,
                number: ValueSet::from_values(number.iter().copied()),
                person: ValueSet::from_values(person.iter().copied()),
                animacy: ValueSet::from_values(animacy.iter().copied()),
            }
        };
        use AnimacyValue::*;
        use NumberValue::*;
        use PersonValue::*;
        use PronounClass::*;
        let entries = [
            ("i", p(Personal, &[Singular], &[First], &[Animate])),
            ("we", p(Personal, &[Plural], &[First], &[Animate])),
            ("you", p(Personal, &[Singular, Plural], &[Second], &[Animate])),
            ("he", p(Personal, &[Singular], &[Third], &[Animate])),
            ("she", p(Personal, &[Singular], &[Third], &[Animate])),
            ("it", p(Personal, &[Singular], &[Third], &[Inanimate])),
            ("they", p(Personal, &[Plural], &[Third], &[])),
            ("this", p(Demonstrative, &[Singular], &[Third], &[])),
            ("that", p(Demonstrative, &[Singular], &[Third], &[])),
            ("these", p(Demonstrative, &[Plural], &[Third], &[])),
            ("those", p(Demonstrative, &[Plural], &[Third], &[])),
            ("himself", p(Reflexive, &[Singular], &[Third], &[Animate])),
            ("herself", p(Reflexive, &[Singular], &[Third], &[Animate])),
            ("itself", p(Reflexive, &[Singular], &[Third], &[Inanimate])),
            ("themselves", p(Reflexive, &[Plural], &[Third], &[])),
        ];
        for (form, entry) in entries {
            lex.pronouns.insert(form.to_string(), entry);
        }
        for v in QUOTE_VERB_LEMMAS {
            lex.quote_verbs.insert(v.to_string());
        }
        for t in TITLE_WORDS {
            lex.titles.insert(t.to_string());
        }
        for n in FEMININE_GIVEN_NAMES {
            lex.names
                .insert(n.to_string(), ValueSet::of(GenderValue::Feminine));
        }
        for n in MASCULINE_GIVEN_NAMES {
            lex.names
                .insert(n.to_string(), ValueSet::of(GenderValue::Masculine));
        }
        for n in FAMILY_NAMES {
            lex.names.insert(n.to_string(), ValueSet::empty());
        }
        for d in ["this", "that", "these", "those"] {
            lex.demonstratives.insert(d.to_string());
        }
        for s in ["i", "we", "you"] {
            lex.speech_pronouns.insert(s.to_string());
        }
        lex
    }
}

fn join_values<'a, I: Iterator<Item = &'a str>>(iter: I) -> String {
    iter.collect::<Vec<_>>().join(",")
}

fn number_name(v: NumberValue) -> &'static str {
    match v {
        NumberValue::Singular => "sing",
        NumberValue::Plural => "plur",
    }
}

fn person_name(v: PersonValue) -> &'static str {
    match v {
        PersonValue::First => "1",
        PersonValue::Second => "2",
        PersonValue::Third => "3",
    }
}

fn animacy_name(v: AnimacyValue) -> &'static str {
    match v {
        AnimacyValue::Animate => "anim",
        AnimacyValue::Inanimate => "inanim",
    }
}

fn gender_name(v: GenderValue) -> &'static str {
    match v {
        GenderValue::Feminine => "fem",
        GenderValue::Masculine => "masc",
        GenderValue::Neuter => "neut",
    }
}

fn parse_gender(s: &str) -> Result<GenderValue> {
    match s {
        "fem" | "f" => Ok(GenderValue::Feminine),
        "masc" | "m" => Ok(GenderValue::Masculine),
        "neut" | "n" => Ok(GenderValue::Neuter),
        other => Err(Error::Lexicon(format!("unknown gender {other:?}"))),
    }
}

type LexLine = (String, Vec<(String, String)>);

fn read_lex_file(path: &Path) -> Result<Vec<LexLine>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Lexicon(format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    for raw in text.lines() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (form, rest) = match line.split_once('\t') {
            Some((f, r)) => (f, r.trim()),
            None => (line, ""),
        };
        let mut fields = Vec::new();
        if !rest.is_empty() {
            for part in rest.split(';') {
                let part = part.trim();
                if part.is_empty() {
                    continue;
                }
                let (k, v) = part.split_once('=').ok_or_else(|| {
                    Error::Lexicon(format!(
                        "{}: field {part:?} is not key=value",
                        path.display()
                    ))
                })?;
                fields.push((k.trim().to_string(), v.trim().to_string()));
            }
        }
        out.push((form.to_lowercase(), fields));
    }
    Ok(out)
}

fn read_opt(dir: &Path, name: &str) -> Result<Vec<LexLine>> {
    let path = dir.join(name);
    if path.exists() {
        read_lex_file(&path)
    } else {
        Ok(Vec::new())
    }
}

fn parse_pronoun_fields(fields: &[(String, String)]) -> Result<PronounEntry> {
    let mut class = None;
    let mut number = ValueSet::empty();
    let mut person = ValueSet::empty();
    let mut animacy = ValueSet::empty();
    for (k, v) in fields {
        match k.as_str() {
            "class" => class = Some(PronounClass::parse(v)?),
            "number" => {
                for part in v.split(',') {
                    number.insert(match part {
                        "sing" | "sg" => NumberValue::Singular,
                        "plur" | "pl" => NumberValue::Plural,
                        other => {
                            return Err(Error::Lexicon(format!("unknown number {other:?}")))
                        }
                    });
                }
            }
            "person" => {
                for part in v.split(',') {
                    person.insert(match part {
                        "1" | "first" => PersonValue::First,
                        "2" | "second" => PersonValue::Second,
                        "3" | "third" => PersonValue::Third,
                        other => {
                            return Err(Error::Lexicon(format!("unknown person {other:?}")))
                        }
                    });
                }
            }
            "animacy" => {
                for part in v.split(',') {
                    animacy.insert(match part {
                        "anim" | "animate" => AnimacyValue::Animate,
                        "inanim" | "inanimate" => AnimacyValue::Inanimate,
                        other => {
                            return Err(Error::Lexicon(format!("unknown animacy {other:?}")))
                        }
                    });
                }
            }
            other => return Err(Error::Lexicon(format!("unknown field {other:?}"))),
        }
    }
    Ok(PronounEntry {
        class: class.ok_or_else(|| Error::Lexicon("pronoun entry without class".into()))?,
        number,
        person,
        animacy,
    })
}
