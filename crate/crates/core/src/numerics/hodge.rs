//! Hodge star on flat Euclidean `R^3`.

/// Star of a 1-form: `a dx + b dy + c dz |-> a dy^dz + b dz^dx + c dx^dy`.
///
/// Components are carried in the bases `(dx, dy, dz)` and
/// `(dy^dz, dz^dx, dx^dy)` respectively, so the component array maps through
/// unchanged; the inverse (star on 2-forms) is the same map, giving
/// `** = +1` on 1-forms.
pub fn hodge_star_r3(one_form: [f64; 3]) -> [f64; 3] {
    one_form
}

/// Star of a 2-form with components in the basis `(dy^dz, dz^dx, dx^dy)`.
pub fn hodge_star_r3_two_form(two_form: [f64; 3]) -> [f64; 3] {
    two_form
}
