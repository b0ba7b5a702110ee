use graph_core::Graph;

use crate::host::{Balls, ThetaHost};
use crate::psi::Psi;

/// Which large balls a residual component reaches.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    /// Touches `B_s'` only.
    S,
    /// Touches `B_t'` only.
    T,
    /// Touches both.
    Full,
}

/// A component of `G ∖ U` with a vertex outside the anchor domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub vertices: u64,
    pub role: Role,
    /// Arm holding the component's anchored vertices.
    pub arm: Option<usize>,
}

/// Shape of an arm in a configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Form {
    /// An s-component, empty towards `t`.
    SComponent,
    /// A t-component, empty towards `s`.
    TComponent,
    /// An s-component and a t-component with an empty stretch between.
    SAndT,
    /// One full component.
    Full,
    /// Nothing beyond the large balls.
    Empty,
}

impl Form {
    /// The form's number, 1 to 5.
    pub fn number(self) -> u8 {
        match self {
            Form::SComponent => 1,
            Form::TComponent => 2,
            Form::SAndT => 3,
            Form::Full => 4,
            Form::Empty => 5,
        }
    }
}

/// Form of one arm and the components assigned to it (s-component first).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArmPlan {
    pub form: Form,
    pub components: Vec<usize>,
}

/// Assignment of residual components to arms for a fixed anchor map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaConfiguration {
    /// One plan per arm.
    pub plans: Vec<ArmPlan>,
}

impl ThetaConfiguration {
    /// Arms declared empty beyond the large balls.
    pub fn empty_arms(&self) -> Vec<usize> {
        (0..self.plans.len()).filter(|&i| self.plans[i].form == Form::Empty).collect()
    }
}

/// Residual components of `G ∖ U`, `U` being the guest vertices that `psi`
/// puts in `B_s ∪ B_t`. Components fully inside the anchor domain are
/// skipped. `None` when some residual component reaches neither large ball
/// or has anchored vertices on two arms: no embedding restricts to `psi`.
pub fn classify_components(g: &Graph, host: &ThetaHost, balls: &Balls, psi: &Psi) -> Option<Vec<Component>> {
    let u: Vec<usize> = psi.iter().filter(|&(_, &h)| balls.in_s[h] || balls.in_t[h]).map(|(&x, _)| x).collect();
    let mut comps = Vec::new();
    for c in graph_core::components_after_removal(g, &u) {
        if c.iter().all(|x| psi.contains_key(x)) {
            continue;
        }
        let touches = |ball: &[bool]| {
            c.iter().any(|x| psi.get(x).is_some_and(|&h| ball[h]))
                || c.iter().flat_map(|&x| g.neighbors(x)).any(|y| psi.get(y).is_some_and(|&h| ball[h]))
        };
        let role = match (touches(&balls.in_s2), touches(&balls.in_t2)) {
            (true, true) => Role::Full,
            (true, false) => Role::S,
            (false, true) => Role::T,
            (false, false) => return None,
        };
        let mut arms = c.iter().filter_map(|x| psi.get(x)).filter_map(|&h| host.locate(h)).map(|(a, _)| a);
        let arm = arms.next();
        if arms.any(|a| Some(a) != arm) {
            return None;
        }
        comps.push(Component { vertices: c.iter().fold(0, |m, &x| m | 1 << x), role, arm });
    }
    Some(comps)
}

fn form_of(roles: &[Role]) -> Option<Form> {
    match roles {
        [] => Some(Form::Empty),
        [Role::S] => Some(Form::SComponent),
        [Role::T] => Some(Form::TComponent),
        [Role::Full] => Some(Form::Full),
        [Role::S, Role::T] => Some(Form::SAndT),
        _ => None,
    }
}

/// All assignments of the components to `k` arms with at most two per arm
/// and consistent forms. A component with anchored vertices stays on their
/// arm. More than `2k` components give no configuration.
pub fn enumerate_configurations(comps: &[Component], k: usize) -> Vec<ThetaConfiguration> {
    let mut out = Vec::new();
    if comps.len() > 2 * k {
        return out;
    }
    let mut choice = vec![0usize; comps.len()];
    loop {
        if choice.iter().zip(comps).all(|(&a, c)| c.arm.is_none_or(|b| a == b)) {
            if let Some(cfg) = configuration(comps, k, &choice) {
                out.push(cfg);
            }
        }
        let mut i = 0;
        while i < choice.len() && choice[i] + 1 == k {
            choice[i] = 0;
            i += 1;
        }
        if i == choice.len() {
            break;
        }
        choice[i] += 1;
    }
    debug_assert!((out.len() as f64) <= (k as f64).powi(2 * k as i32));
    out
}

fn configuration(comps: &[Component], k: usize, choice: &[usize]) -> Option<ThetaConfiguration> {
    let plans = (0..k)
        .map(|arm| {
            let mut on: Vec<usize> = (0..comps.len()).filter(|&c| choice[c] == arm).collect();
            on.sort_by_key(|&c| comps[c].role);
            let roles: Vec<Role> = on.iter().map(|&c| comps[c].role).collect();
            form_of(&roles).map(|form| ArmPlan { form, components: on })
        })
        .collect::<Option<Vec<_>>>()?;
    Some(ThetaConfiguration { plans })
}
