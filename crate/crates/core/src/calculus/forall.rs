use super::ir::{BlockKind, CalculusQuery, QuantifierBlock};

/// Rewrites `¬∃x [φ ∧ ¬∃y ψ]` into `∀x [φ → ∃y ψ]`.
///
/// A not-exists block matches only when it has exactly one child and that child
/// is itself not-exists; the rewrite runs bottom-up to a fixpoint. Blocks with
/// several negated children stay as they are, since pushing the rewrite through
/// them would turn a disjunction into a conjunction.
pub fn forall_transform(q: &CalculusQuery) -> CalculusQuery {
    let mut out = q.clone();
    while rewrite(&mut out.root) {}
    out
}

fn rewrite(b: &mut QuantifierBlock) -> bool {
    let mut changed = false;
    for c in &mut b.children {
        changed |= rewrite(c);
    }
    if b.kind == BlockKind::NotExists
        && b.children.len() == 1
        && b.children[0].kind == BlockKind::NotExists
    {
        b.kind = BlockKind::ForallImplies;
        b.children[0].kind = BlockKind::Exists;
        changed = true;
    }
    changed
}

/// Inverse of [`forall_transform`]: every `∀x [φ → ∃y ψ]` goes back to
/// `¬∃x [φ ∧ ¬∃y ψ]`. Used where the visual dialect has no ∀ notation.
pub fn expand_forall(q: &CalculusQuery) -> CalculusQuery {
    let mut out = q.clone();
    expand(&mut out.root);
    out
}

fn expand(b: &mut QuantifierBlock) {
    for c in &mut b.children {
        expand(c);
    }
    if b.kind == BlockKind::ForallImplies {
        debug_assert_eq!(b.children.len(), 1, "forall block with one conclusion");
        b.kind = BlockKind::NotExists;
        for c in &mut b.children {
            c.kind = match c.kind {
                BlockKind::Exists => BlockKind::NotExists,
                BlockKind::NotExists => BlockKind::Exists,
                k => k,
            };
        }
    }
}
