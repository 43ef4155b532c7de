//! Ordered multi-pushdown systems: n stacks with destructive pops.
//!
//! Stacks are linearly ordered. Pushes and internal moves touch nothing
//! else, but popping stack i empties every stack before it. Controls encode
//! as n-ary symbols over one shared stack sort, and the destruction is
//! literal in the generated rule: the first i-1 right-side arguments are the
//! bottom constant.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::alphabet::{is_identifier, RankedAlphabet};
use crate::automata::{target_automaton, Afta, AutomatonError, TargetSpec};
use crate::rewrite::{RewriteRule, RootRewriteSystem};
use crate::term::{Pattern, Term};

use super::{err, logical_lines, parse_word_literal, split_command, word_literal, FrontendParseError};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OmpdsSpec {
    /// Number of stacks, at least 1.
    pub stacks: usize,
    pub controls: Vec<String>,
    /// Shared stack alphabet including the bottom marker.
    pub gamma: Vec<String>,
    pub bottom: String,
    pub commands: Vec<OmpdsCommand>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum OmpdsCommand {
    Internal {
        from: String,
        to: String,
    },
    Push {
        from: String,
        stack: usize,
        sym: String,
        to: String,
    },
    /// Pops `sym` off `stack` and empties every stack before it.
    Pop {
        from: String,
        stack: usize,
        sym: String,
        to: String,
    },
}

impl OmpdsCommand {
    fn from_control(&self) -> &str {
        match self {
            OmpdsCommand::Internal { from, .. }
            | OmpdsCommand::Push { from, .. }
            | OmpdsCommand::Pop { from, .. } => from,
        }
    }

    fn to_control(&self) -> &str {
        match self {
            OmpdsCommand::Internal { to, .. }
            | OmpdsCommand::Push { to, .. }
            | OmpdsCommand::Pop { to, .. } => to,
        }
    }
}

/// Control state plus one word per stack, top first, without bottoms.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct OmpdsConfig {
    pub control: String,
    pub stacks: Vec<Vec<String>>,
}

impl fmt::Display for OmpdsConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [", self.control)?;
        for (i, stack) in self.stacks.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "\"{}\"", word_literal(stack))?;
        }
        write!(f, "]")
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum OmpdsTarget {
    Control(String),
    Config(OmpdsConfig),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OmpdsError {
    #[error("a system needs at least one stack")]
    NoStacks,
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
    #[error("stack index {0} is out of range")]
    StackIndex(usize),
    #[error("the bottom marker `{0}` cannot be pushed or popped")]
    MovesBottom(String),
    #[error("configuration has {got} stacks, the system has {expected}")]
    StackCount { expected: usize, got: usize },
    #[error("term is not an encoded configuration: {0}")]
    NotAConfiguration(String),
}

impl OmpdsSpec {
    pub fn validate(&self) -> Result<(), OmpdsError> {
        if self.stacks == 0 {
            return Err(OmpdsError::NoStacks);
        }
        let mut seen = BTreeSet::new();
        for name in self.controls.iter().chain(&self.gamma) {
            if !is_identifier(name) {
                return Err(OmpdsError::BadIdentifier(name.clone()));
            }
            if !seen.insert(name.clone()) {
                return Err(OmpdsError::Duplicate(name.clone()));
            }
        }
        if !self.gamma.contains(&self.bottom) {
            return Err(OmpdsError::BottomNotDeclared(self.bottom.clone()));
        }
        for cmd in &self.commands {
            self.check_control(cmd.from_control())?;
            self.check_control(cmd.to_control())?;
            if let OmpdsCommand::Push { stack, sym, .. } | OmpdsCommand::Pop { stack, sym, .. } =
                cmd
            {
                if !(1..=self.stacks).contains(stack) {
                    return Err(OmpdsError::StackIndex(*stack));
                }
                if sym == &self.bottom {
                    return Err(OmpdsError::MovesBottom(sym.clone()));
                }
                if !self.gamma.contains(sym) {
                    return Err(OmpdsError::UnknownSymbol(sym.clone()));
                }
            }
        }
        Ok(())
    }

    fn check_control(&self, name: &str) -> Result<(), OmpdsError> {
        if self.controls.iter().any(|c| c == name) {
            Ok(())
        } else {
            Err(OmpdsError::UnknownControl(name.to_string()))
        }
    }

    pub fn check_config(&self, config: &OmpdsConfig) -> Result<(), OmpdsError> {
        self.check_control(&config.control)?;
        if config.stacks.len() != self.stacks {
            return Err(OmpdsError::StackCount {
                expected: self.stacks,
                got: config.stacks.len(),
            });
        }
        for stack in &config.stacks {
            for sym in stack {
                if sym == &self.bottom {
                    return Err(OmpdsError::MovesBottom(sym.clone()));
                }
                if !self.gamma.contains(sym) {
                    return Err(OmpdsError::UnknownSymbol(sym.clone()));
                }
            }
        }
        Ok(())
    }

    /// Native semantics of command `index` on `config`.
    pub fn step(&self, config: &OmpdsConfig, index: usize) -> Option<OmpdsConfig> {
        let cmd = &self.commands[index];
        if config.control != cmd.from_control() {
            return None;
        }
        let mut stacks = config.stacks.clone();
        match cmd {
            OmpdsCommand::Internal { .. } => {}
            OmpdsCommand::Push { stack, sym, .. } => {
                stacks[stack - 1].insert(0, sym.clone());
            }
            OmpdsCommand::Pop { stack, sym, .. } => {
                let i = stack - 1;
                let (first, rest) = stacks[i].split_first()?;
                if first != sym {
                    return None;
                }
                stacks[i] = rest.to_vec();
                for lower in stacks.iter_mut().take(i) {
                    lower.clear();
                }
            }
        }
        Some(OmpdsConfig {
            control: cmd.to_control().to_string(),
            stacks,
        })
    }
}

#[derive(Clone, Debug)]
pub struct OmpdsEncoding {
    spec: OmpdsSpec,
    system: RootRewriteSystem,
    labels: Vec<Vec<String>>,
}

pub fn encode_ompds(spec: &OmpdsSpec) -> Result<OmpdsEncoding, OmpdsError> {
    spec.validate()?;
    let mut builder = RankedAlphabet::builder().sort("stack");
    for sym in &spec.gamma {
        if sym == &spec.bottom {
            builder = builder.stack(sym, &[], "stack");
        } else {
            builder = builder.stack(sym, &["stack"], "stack");
        }
    }
    let stack_args: Vec<&str> = vec!["stack"; spec.stacks];
    for control in &spec.controls {
        builder = builder.control(control, &stack_args);
    }
    let alphabet = builder
        .finish()
        .map_err(|e| OmpdsError::BadIdentifier(e.to_string()))?;

    let stack_sort = alphabet.sort_id("stack").expect("stack sort declared");
    let sym = |n: &str| alphabet.symbol_id(n).expect("validated symbol");
    let var = |i: usize| Pattern::var(&format!("x{i}"), stack_sort);
    let app = |s: &str, children: Vec<Pattern>| {
        Pattern::app(&alphabet, sym(s), children).expect("generated patterns are well-sorted")
    };

    let mut rules = Vec::new();
    let mut labels = Vec::new();
    for (i, cmd) in spec.commands.iter().enumerate() {
        let label = format!("m{i}");
        let plain: Vec<Pattern> = (1..=spec.stacks).map(var).collect();
        let (lhs_args, rhs_args) = match cmd {
            OmpdsCommand::Internal { .. } => (plain.clone(), plain),
            OmpdsCommand::Push { stack, sym: a, .. } => {
                let mut rhs = plain.clone();
                rhs[stack - 1] = app(a, vec![var(*stack)]);
                (plain, rhs)
            }
            OmpdsCommand::Pop { stack, sym: a, .. } => {
                let mut lhs = plain.clone();
                lhs[stack - 1] = app(a, vec![var(*stack)]);
                let mut rhs = plain;
                for slot in rhs.iter_mut().take(stack - 1) {
                    *slot = app(&spec.bottom, vec![]);
                }
                (lhs, rhs)
            }
        };
        rules.push(RewriteRule {
            label: label.clone(),
            lhs: app(cmd.from_control(), lhs_args),
            rhs: app(cmd.to_control(), rhs_args),
        });
        labels.push(vec![label]);
    }
    let system = RootRewriteSystem::new(alphabet, rules)
        .expect("generated rules are in the restricted class");
    Ok(OmpdsEncoding {
        spec: spec.clone(),
        system,
        labels,
    })
}

impl OmpdsEncoding {
    pub fn spec(&self) -> &OmpdsSpec {
        &self.spec
    }

    pub fn system(&self) -> &RootRewriteSystem {
        &self.system
    }

    pub fn alphabet(&self) -> &RankedAlphabet {
        self.system.alphabet()
    }

    pub fn labels(&self, index: usize) -> &[String] {
        &self.labels[index]
    }

    pub fn encode_config(&self, config: &OmpdsConfig) -> Result<Term, OmpdsError> {
        self.spec.check_config(config)?;
        let alphabet = self.alphabet();
        let sym = |n: &str| alphabet.symbol_id(n).expect("validated symbol");
        let mut children = Vec::with_capacity(self.spec.stacks);
        for stack in &config.stacks {
            let mut term =
                Term::new(alphabet, sym(&self.spec.bottom), vec![]).expect("bottom is nullary");
            for s in stack.iter().rev() {
                term = Term::new(alphabet, sym(s), vec![term]).expect("stack symbols are unary");
            }
            children.push(term);
        }
        Term::new(alphabet, sym(&config.control), children)
            .map_err(|e| OmpdsError::NotAConfiguration(e.to_string()))
    }

    pub fn decode_config(&self, term: &Term) -> Result<OmpdsConfig, OmpdsError> {
        let alphabet = self.alphabet();
        let name = |t: &Term| alphabet.symbol(t.sym()).name.clone();
        let control = name(term);
        if !self.spec.controls.contains(&control) {
            return Err(OmpdsError::NotAConfiguration(format!(
                "root `{control}` is not a control state"
            )));
        }
        let mut stacks = Vec::with_capacity(self.spec.stacks);
        for child in term.children() {
            let mut word = Vec::new();
            let mut cursor = child;
            loop {
                let sym = name(cursor);
                if sym == self.spec.bottom {
                    break;
                }
                word.push(sym);
                cursor = &cursor.children()[0];
            }
            stacks.push(word);
        }
        Ok(OmpdsConfig { control, stacks })
    }

    pub fn target(&self, targets: &[OmpdsTarget]) -> Result<Afta, OmpdsError> {
        let mut specs = Vec::new();
        for t in targets {
            match t {
                OmpdsTarget::Control(c) => {
                    self.spec.check_control(c)?;
                    let sym = self.alphabet().symbol_id(c).expect("control declared");
                    specs.push(TargetSpec::Control(sym));
                }
                OmpdsTarget::Config(c) => {
                    specs.push(TargetSpec::Term(self.encode_config(c)?));
                }
            }
        }
        target_automaton(self.alphabet(), &specs).map_err(|e: AutomatonError| {
            OmpdsError::NotAConfiguration(e.to_string())
        })
    }
}

/// Parses the `[ompds n=K]` file format: `controls:`/`gamma:`/optional
/// `bottom:` declarations, command lines `p : internal -> q`,
/// `p : push(i, a) -> q`, `p : pop(i, a) -> q`, and target lines
/// `target control q` / `target config p ["ab.", "b."]`.
pub fn parse_ompds_file(text: &str) -> Result<(OmpdsSpec, Vec<OmpdsTarget>), FrontendParseError> {
    let lines = logical_lines(text);
    let mut it = lines.into_iter();
    let stacks = match it.next() {
        Some((n, l)) => {
            let inner = l
                .strip_prefix("[ompds")
                .and_then(|r| r.strip_suffix(']'))
                .ok_or_else(|| err(n, format!("expected `[ompds n=K]` header, found `{l}`")))?;
            let count = inner
                .trim()
                .strip_prefix("n=")
                .and_then(|v| v.parse::<usize>().ok())
                .ok_or_else(|| err(n, format!("expected `n=K` in header, found `{inner}`")))?;
            count
        }
        None => return Err(err(1, "empty file")),
    };
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
            commands.push(parse_ompds_command(n, from, &cmd, to)?);
        } else {
            return Err(err(n, format!("cannot parse `{line}`")));
        }
    }
    let spec = OmpdsSpec {
        stacks,
        controls,
        gamma,
        bottom: bottom.unwrap_or_else(|| "bot".to_string()),
        commands,
    };
    Ok((spec, targets))
}

fn parse_ompds_command(
    n: usize,
    from: String,
    cmd: &str,
    to: String,
) -> Result<OmpdsCommand, FrontendParseError> {
    if cmd == "internal" {
        return Ok(OmpdsCommand::Internal { from, to });
    }
    for (name, is_push) in [("push", true), ("pop", false)] {
        if let Some(inner) = cmd
            .strip_prefix(name)
            .and_then(|r| r.trim().strip_prefix('('))
            .and_then(|r| r.strip_suffix(')'))
        {
            let (i, sym) = inner
                .split_once(',')
                .ok_or_else(|| err(n, format!("expected `{name}(i, sym)`, found `{cmd}`")))?;
            let stack = i
                .trim()
                .parse::<usize>()
                .map_err(|_| err(n, format!("bad stack index `{}`", i.trim())))?;
            let sym = sym.trim().to_string();
            return Ok(if is_push {
                OmpdsCommand::Push {
                    from,
                    stack,
                    sym,
                    to,
                }
            } else {
                OmpdsCommand::Pop {
                    from,
                    stack,
                    sym,
                    to,
                }
            });
        }
    }
    Err(err(
        n,
        format!("expected `internal`, `push(i, sym)` or `pop(i, sym)`, found `{cmd}`"),
    ))
}

fn parse_target(
    n: usize,
    rest: &str,
    gamma: &[String],
) -> Result<OmpdsTarget, FrontendParseError> {
    if let Some(control) = rest.strip_prefix("control") {
        return Ok(OmpdsTarget::Control(control.trim().to_string()));
    }
    if let Some(config) = rest.strip_prefix("config") {
        let config = config.trim();
        let (control, list) = config
            .split_once('[')
            .ok_or_else(|| err(n, format!("expected `config p [\"w.\", ...]`, found `{config}`")))?;
        let list = list
            .strip_suffix(']')
            .ok_or_else(|| err(n, "unterminated stack list"))?;
        let symbols: BTreeSet<String> = gamma.iter().cloned().collect();
        let mut stacks = Vec::new();
        for part in list.split(',') {
            let part = part.trim();
            let raw = part
                .strip_prefix('"')
                .and_then(|r| r.strip_suffix('"'))
                .ok_or_else(|| err(n, format!("expected quoted stack word, found `{part}`")))?;
            stacks.push(parse_word_literal(raw, &symbols).map_err(|m| err(n, m))?);
        }
        return Ok(OmpdsTarget::Config(OmpdsConfig {
            control: control.trim().to_string(),
            stacks,
        }));
    }
    Err(err(n, format!("expected `control` or `config`, found `{rest}`")))
}
