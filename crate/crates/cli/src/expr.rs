//! Scalar right-hand sides given as text, e.g. `-y + sin(t)`.

/// A parsed expression in the variables `t` and `y`.
pub struct Rhs {
    expr: meval::Expr,
}

pub fn compile(text: &str) -> Result<Rhs, String> {
    let expr: meval::Expr = text.parse().map_err(|e: meval::Error| e.to_string())?;
    // Reject unknown names and wrong arities up front.
    let _bound = expr.clone().bind2("t", "y").map_err(|e| e.to_string())?;
    Ok(Rhs { expr })
}

impl Rhs {
    pub fn eval(&self, t: f64, y: f64) -> f64 {
        let mut ctx = meval::Context::new();
        ctx.var("t", t).var("y", y);
        self.expr.eval_with_context(ctx).unwrap_or(f64::NAN)
    }
}
