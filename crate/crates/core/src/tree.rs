//! Value trees: what a device exports at the end of a round, and the
//! projections that align a neighbour's tree with the expression being
//! evaluated.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::nvalue::NValue;
use crate::value::{DeviceId, FunName, LocalValue};

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Plain(Vec<ValueTree>),
    Tagged(NValue, Vec<ValueTree>),
    KeyMap(BTreeMap<LocalValue, ValueTree>),
}

/// A value tree. The empty tree `⟨⟩` carries no allocation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValueTree(Option<Arc<Node>>);

impl ValueTree {
    pub fn empty() -> Self {
        ValueTree(None)
    }

    pub fn plain(children: Vec<ValueTree>) -> Self {
        ValueTree(Some(Arc::new(Node::Plain(children))))
    }

    pub fn tagged(tag: NValue, children: Vec<ValueTree>) -> Self {
        ValueTree(Some(Arc::new(Node::Tagged(tag, children))))
    }

    pub fn key_map(entries: BTreeMap<LocalValue, ValueTree>) -> Self {
        ValueTree(Some(Arc::new(Node::KeyMap(entries))))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_none()
    }

    pub fn node(&self) -> Option<&Node> {
        self.0.as_deref()
    }

    pub fn tag(&self) -> Option<&NValue> {
        match self.node() {
            Some(Node::Tagged(tag, _)) => Some(tag),
            _ => None,
        }
    }

    pub fn children(&self) -> &[ValueTree] {
        match self.node() {
            Some(Node::Plain(c)) | Some(Node::Tagged(_, c)) => c,
            _ => &[],
        }
    }

    /// `π_i` on one tree, 1-based.
    pub fn child(&self, i: usize) -> Option<&ValueTree> {
        i.checked_sub(1).and_then(|i| self.children().get(i))
    }

    pub fn entries(&self) -> Option<&BTreeMap<LocalValue, ValueTree>> {
        match self.node() {
            Some(Node::KeyMap(m)) => Some(m),
            _ => None,
        }
    }

    /// Number of nodes, the empty tree counting zero.
    pub fn size(&self) -> usize {
        match self.node() {
            None => 0,
            Some(Node::Plain(c)) | Some(Node::Tagged(_, c)) => {
                1 + c.iter().map(ValueTree::size).sum::<usize>()
            }
            Some(Node::KeyMap(m)) => 1 + m.values().map(ValueTree::size).sum::<usize>(),
        }
    }
}

impl fmt::Display for ValueTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list(f: &mut fmt::Formatter<'_>, c: &[ValueTree]) -> fmt::Result {
            write!(f, "[")?;
            for (i, t) in c.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{t}")?;
            }
            write!(f, "]")
        }
        match self.node() {
            None => write!(f, "<>"),
            Some(Node::Plain(c)) => list(f, c),
            Some(Node::Tagged(tag, c)) => {
                write!(f, "{tag}")?;
                list(f, c)
            }
            Some(Node::KeyMap(m)) => {
                write!(f, "{{")?;
                for (i, (k, t)) in m.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{k}: {t}")?;
                }
                write!(f, "}}")
            }
        }
    }
}

/// `Θ`: the trees received from neighbours, possibly including the
/// device's own tree from its previous round.
pub type TreeEnv = BTreeMap<DeviceId, ValueTree>;

/// Borrowed environment used during evaluation, sorted by device.
pub(crate) type EnvView<'t> = Vec<(DeviceId, &'t ValueTree)>;

pub(crate) fn view(env: &TreeEnv) -> EnvView<'_> {
    env.iter().map(|(d, t)| (*d, t)).collect()
}

pub(crate) fn view_child<'t>(env: &[(DeviceId, &'t ValueTree)], i: usize) -> EnvView<'t> {
    env.iter()
        .filter_map(|(d, t)| t.child(i).map(|c| (*d, c)))
        .collect()
}

pub(crate) fn view_fun<'t>(
    env: &[(DeviceId, &'t ValueTree)],
    at: DeviceId,
    name: FunName,
) -> EnvView<'t> {
    env.iter()
        .filter(|(_, t)| {
            t.tag()
                .and_then(|tag| tag.get(at).fun_name())
                .is_some_and(|n| n == name)
        })
        .map(|(d, t)| (*d, *t))
        .collect()
}

/// `π_i(Θ)`, 1-based. Neighbours whose tree has no `i`-th child are dropped.
pub fn project_child(env: &TreeEnv, i: usize) -> TreeEnv {
    env.iter()
        .filter_map(|(d, t)| t.child(i).map(|c| (*d, c.clone())))
        .collect()
}

/// `Θ|f`: neighbours whose root tag, read at `at`, names the same function
/// as `f`. Data values name no function and select nothing.
pub fn project_fun(env: &TreeEnv, at: DeviceId, f: &LocalValue) -> TreeEnv {
    let Some(name) = f.fun_name() else {
        return TreeEnv::new();
    };
    let v = view(env);
    view_fun(&v, at, name)
        .into_iter()
        .map(|(d, t)| (d, t.clone()))
        .collect()
}
