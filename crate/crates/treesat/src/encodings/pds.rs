//! Pushdown systems: one control state, one stack.
//!
//! A command `(p, a, q, w)` reads top symbol `a` in control `p` and replaces
//! it with the word `w`, moving to `q`. Stacks encode as unary chains ending
//! in the bottom constant, so the command becomes the root rewrite rule
//! `p(a(?x)) -> q(w1(...wk(?x)...))`. A command whose top symbol is the
//! bottom marker applies to the empty stack only and encodes as a ground
//! rule.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::alphabet::{is_identifier, RankedAlphabet};
use crate::automata::{target_automaton, Afta, AutomatonError, TargetSpec};
use crate::rewrite::{RewriteRule, RootRewriteSystem};
use crate::term::{Pattern, Term};

use super::{err, logical_lines, parse_word_literal, split_command, word_literal, FrontendParseError};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PdsSpec {
    pub controls: Vec<String>,
    /// Stack alphabet including the bottom marker.
    pub gamma: Vec<String>,
    pub bottom: String,
    pub commands: Vec<PdsCommand>,
}

/// In `from` with `top` on the stack, replace it by `push` (top first) and
/// move to `to`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PdsCommand {
    pub from: String,
    pub top: String,
    pub to: String,
    pub push: Vec<String>,
}

/// Control state plus stack word, top first, without the bottom marker.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct PdsConfig {
    pub control: String,
    pub word: Vec<String>,
}

impl fmt::Display for PdsConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} \"{}\"", self.control, word_literal(&self.word))
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum PdsTarget {
    Control(String),
    Config(PdsConfig),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PdsError {
    #[error("`{0}` is not a valid identifier")]
    BadIdentifier(String),
    #[error("`{0}` is declared twice")]
    Duplicate(String),
    #[error("bottom symbol `{0}` is not in the stack alphabet")]
    BottomNotDeclared(String),
    #[error("unknown control state `{0}`")]
    UnknownControl(String),
    #[error("unknown stack symbol `{0}`")]
    UnknownSymbol(String),
    #[error("the bottom marker `{0}` cannot be pushed")]
    PushesBottom(String),
    #[error("term is not an encoded configuration: {0}")]
    NotAConfiguration(String),
}

impl PdsSpec {
    pub fn validate(&self) -> Result<(), PdsError> {
        let mut seen = BTreeSet::new();
        for name in self.controls.iter().chain(&self.gamma) {
            if !is_identifier(name) {
                return Err(PdsError::BadIdentifier(name.clone()));
            }
            if !seen.insert(name.clone()) {
                return Err(PdsError::Duplicate(name.clone()));
            }
        }
        if !self.gamma.contains(&self.bottom) {
            return Err(PdsError::BottomNotDeclared(self.bottom.clone()));
        }
        for cmd in &self.commands {
            self.check_control(&cmd.from)?;
            self.check_control(&cmd.to)?;
            if !self.gamma.contains(&cmd.top) {
                return Err(PdsError::UnknownSymbol(cmd.top.clone()));
            }
            for sym in &cmd.push {
                if sym == &self.bottom {
                    return Err(PdsError::PushesBottom(sym.clone()));
                }
                if !self.gamma.contains(sym) {
                    return Err(PdsError::UnknownSymbol(sym.clone()));
                }
            }
        }
        Ok(())
    }

    fn check_control(&self, name: &str) -> Result<(), PdsError> {
        if self.controls.iter().any(|c| c == name) {
            Ok(())
        } else {
            Err(PdsError::UnknownControl(name.to_string()))
        }
    }

    pub fn check_config(&self, config: &PdsConfig) -> Result<(), PdsError> {
        self.check_control(&config.control)?;
        for sym in &config.word {
            if sym == &self.bottom {
                return Err(PdsError::PushesBottom(sym.clone()));
            }
            if !self.gamma.contains(sym) {
                return Err(PdsError::UnknownSymbol(sym.clone()));
            }
        }
        Ok(())
    }

    /// Native semantics of command `index` on `config`, `None` when it does
    /// not apply. A bottom-topped command applies exactly to the empty stack.
    pub fn step(&self, config: &PdsConfig, index: usize) -> Option<PdsConfig> {
        let cmd = &self.commands[index];
        if config.control != cmd.from {
            return None;
        }
        let rest: &[String] = if cmd.top == self.bottom {
            if !config.word.is_empty() {
                return None;
            }
            &[]
        } else {
            let (first, rest) = config.word.split_first()?;
            if first != &cmd.top {
                return None;
            }
            rest
        };
        let mut word = cmd.push.clone();
        word.extend(rest.iter().cloned());
        Some(PdsConfig {
            control: cmd.to.clone(),
            word,
        })
    }
}

/// The compiled system plus everything needed to move between native
/// configurations and terms.
#[derive(Clone, Debug)]
pub struct PdsEncoding {
    spec: PdsSpec,
    system: RootRewriteSystem,
    /// Rule labels generated for each command, parallel to `spec.commands`.
    labels: Vec<Vec<String>>,
}

pub fn encode_pds(spec: &PdsSpec) -> Result<PdsEncoding, PdsError> {
    spec.validate()?;
    let mut builder = RankedAlphabet::builder().sort("stack");
    for sym in &spec.gamma {
        if sym == &spec.bottom {
            builder = builder.stack(sym, &[], "stack");
        } else {
            builder = builder.stack(sym, &["stack"], "stack");
        }
    }
    for control in &spec.controls {
        builder = builder.control(control, &["stack"]);
    }
    let alphabet = builder
        .finish()
        .map_err(|e| PdsError::BadIdentifier(e.to_string()))?;

    let stack_sort = alphabet.sort_id("stack").expect("stack sort declared");
    let mut rules = Vec::new();
    let mut labels = Vec::new();
    for (i, cmd) in spec.commands.iter().enumerate() {
        let label = format!("m{i}");
        let sym = |n: &str| alphabet.symbol_id(n).expect("validated symbol");
        let tail = if cmd.top == spec.bottom {
            Pattern::app(&alphabet, sym(&spec.bottom), vec![]).expect("bottom is nullary")
        } else {
            Pattern::var("x", stack_sort)
        };
        let lhs_inner = if cmd.top == spec.bottom {
            tail.clone()
        } else {
            Pattern::app(&alphabet, sym(&cmd.top), vec![tail.clone()]).expect("top is unary")
        };
        let mut rhs_inner = tail;
        for sym_name in cmd.push.iter().rev() {
            rhs_inner = Pattern::app(&alphabet, sym(sym_name), vec![rhs_inner])
                .expect("pushed symbols are unary");
        }
        rules.push(RewriteRule {
            label: label.clone(),
            lhs: Pattern::app(&alphabet, sym(&cmd.from), vec![lhs_inner])
                .expect("controls are unary"),
            rhs: Pattern::app(&alphabet, sym(&cmd.to), vec![rhs_inner])
                .expect("controls are unary"),
        });
        labels.push(vec![label]);
    }
    let system = RootRewriteSystem::new(alphabet, rules)
        .expect("generated rules are in the restricted class");
    Ok(PdsEncoding {
        spec: spec.clone(),
        system,
        labels,
    })
}

impl PdsEncoding {
    pub fn spec(&self) -> &PdsSpec {
        &self.spec
    }

    pub fn system(&self) -> &RootRewriteSystem {
        &self.system
    }

    pub fn alphabet(&self) -> &RankedAlphabet {
        self.system.alphabet()
    }

    /// Labels of the rules generated for command `index`.
    pub fn labels(&self, index: usize) -> &[String] {
        &self.labels[index]
    }

    pub fn encode_config(&self, config: &PdsConfig) -> Result<Term, PdsError> {
        self.spec.check_config(config)?;
        let alphabet = self.alphabet();
        let sym = |n: &str| alphabet.symbol_id(n).expect("validated symbol");
        let mut term = Term::new(alphabet, sym(&self.spec.bottom), vec![])
            .expect("bottom is nullary");
        for s in config.word.iter().rev() {
            term = Term::new(alphabet, sym(s), vec![term]).expect("stack symbols are unary");
        }
        Term::new(alphabet, sym(&config.control), vec![term])
            .map_err(|e| PdsError::NotAConfiguration(e.to_string()))
    }

    pub fn decode_config(&self, term: &Term) -> Result<PdsConfig, PdsError> {
        let alphabet = self.alphabet();
        let name = |t: &Term| alphabet.symbol(t.sym()).name.clone();
        let control = name(term);
        if !self.spec.controls.contains(&control) {
            return Err(PdsError::NotAConfiguration(format!(
                "root `{control}` is not a control state"
            )));
        }
        let mut word = Vec::new();
        let mut cursor = &term.children()[0];
        loop {
            let sym = name(cursor);
            if sym == self.spec.bottom {
                break;
            }
            word.push(sym);
            cursor = &cursor.children()[0];
        }
        Ok(PdsConfig { control, word })
    }

    pub fn target(&self, targets: &[PdsTarget]) -> Result<Afta, PdsError> {
        let mut specs = Vec::new();
        for t in targets {
            match t {
                PdsTarget::Control(c) => {
                    self.spec.check_control(c)?;
                    let sym = self.alphabet().symbol_id(c).expect("control declared");
                    specs.push(TargetSpec::Control(sym));
                }
                PdsTarget::Config(c) => {
                    specs.push(TargetSpec::Term(self.encode_config(c)?));
                }
            }
        }
        target_automaton(self.alphabet(), &specs).map_err(|e: AutomatonError| {
            PdsError::NotAConfiguration(e.to_string())
        })
    }
}

/// Parses the `[pds]` file format: `controls:` and `gamma:` declarations, an
/// optional `bottom:` line (default `bot`), command lines
/// `p : rw(a, b c) -> q` with `eps` for the empty word, and target lines
/// `target control q` / `target config p "ab."`.
pub fn parse_pds_file(text: &str) -> Result<(PdsSpec, Vec<PdsTarget>), FrontendParseError> {
    let lines = logical_lines(text);
    let mut it = lines.into_iter();
    match it.next() {
        Some((_, l)) if l == "[pds]" => {}
        Some((n, l)) => return Err(err(n, format!("expected `[pds]` header, found `{l}`"))),
        None => return Err(err(1, "empty file")),
    }
    let mut controls = Vec::new();
    let mut gamma = Vec::new();
    let mut bottom = None;
    let mut commands = Vec::new();
    let mut targets = Vec::new();
    for (n, line) in it {
        if let Some(rest) = line.strip_prefix("controls:") {
            controls.extend(rest.split_whitespace().map(str::to_string));
        } else if let Some(rest) = line.strip_prefix("gamma:") {
            gamma.extend(rest.split_whitespace().map(str::to_string));
        } else if let Some(rest) = line.strip_prefix("bottom:") {
            bottom = Some(rest.trim().to_string());
        } else if let Some(rest) = line.strip_prefix("target") {
            targets.push(parse_target(n, rest.trim(), &gamma)?);
        } else if let Some((from, cmd, to)) = split_command(&line) {
            commands.push(parse_command(n, from, &cmd, to)?);
        } else {
            return Err(err(n, format!("cannot parse `{line}`")));
        }
    }
    let spec = PdsSpec {
        controls,
        gamma,
        bottom: bottom.unwrap_or_else(|| "bot".to_string()),
        commands,
    };
    Ok((spec, targets))
}

fn parse_command(
    n: usize,
    from: String,
    cmd: &str,
    to: String,
) -> Result<PdsCommand, FrontendParseError> {
    let inner = cmd
        .strip_prefix("rw(")
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| err(n, format!("expected `rw(top, word)`, found `{cmd}`")))?;
    let (top, word) = inner
        .split_once(',')
        .ok_or_else(|| err(n, format!("expected `rw(top, word)`, found `{cmd}`")))?;
    let word = word.trim();
    let push = if word == "eps" {
        Vec::new()
    } else {
        word.split_whitespace().map(str::to_string).collect()
    };
    Ok(PdsCommand {
        from,
        top: top.trim().to_string(),
        to,
        push,
    })
}

fn parse_target(
    n: usize,
    rest: &str,
    gamma: &[String],
) -> Result<PdsTarget, FrontendParseError> {
    if let Some(control) = rest.strip_prefix("control") {
        return Ok(PdsTarget::Control(control.trim().to_string()));
    }
    if let Some(config) = rest.strip_prefix("config") {
        let config = config.trim();
        let (control, quoted) = config
            .split_once('"')
            .ok_or_else(|| err(n, format!("expected `config p \"word.\"`, found `{config}`")))?;
        let raw = quoted
            .strip_suffix('"')
            .ok_or_else(|| err(n, "unterminated stack word"))?;
        let symbols: BTreeSet<String> = gamma.iter().cloned().collect();
        let word = parse_word_literal(raw, &symbols).map_err(|m| err(n, m))?;
        return Ok(PdsTarget::Config(PdsConfig {
            control: control.trim().to_string(),
            word,
        }));
    }
    Err(err(n, format!("expected `control` or `config`, found `{rest}`")))
}
