use crate::env::Goal;

use super::{ContrastReport, DeathRisk, Explanation, LongRun, Question};

pub fn render_explanation(e: &Explanation) -> String {
    let [f1, f2] = &e.relevant_features;
    format!(
        "Because {} is {} and {} is {}, it is {} that it's {} performing action {}. \
         Therefore, my plan is taking action {} to achieve goal {}.",
        f1.variable.title(),
        f1.value,
        f2.variable.title(),
        f2.value,
        e.certainty,
        e.safety.word(),
        e.chosen_action,
        e.chosen_action,
        e.subgoal.title(),
    )
}

fn goal_list(goals: &[Goal]) -> String {
    goals.iter().map(|g| g.phrase()).collect::<Vec<_>>().join(" or ")
}

pub fn render_contrast(c: &ContrastReport) -> String {
    let more_likely_to_die = c.death_risk == DeathRisk::MoreLikelyToDie;
    let also_die = format!(" Also, it's more likely to die if I don't perform action {}.", c.chosen_action);
    let mut t = String::new();
    match c.question {
        Question::Why => {
            t.push_str(&format!("The second best option is doing {}", c.compared_action));
            if !c.lost_goals.is_empty() {
                t.push_str(&format!(", but I wouldn't {}", goal_list(&c.lost_goals)));
            }
            if c.similar_results() {
                t.push_str(" and performing it would give similar results");
            }
            t.push('.');
            if more_likely_to_die {
                t.push_str(&also_die);
            }
        }
        Question::WhyNot(a) => {
            t.push_str(&format!("If I perform action {a}"));
            if c.compared_dies {
                t.push_str(" I will die.");
            } else {
                if !c.lost_goals.is_empty() {
                    t.push_str(&format!(" I won't {}, and", goal_list(&c.lost_goals)));
                }
                let option = match c.long_run {
                    LongRun::Worse => "a worse option",
                    LongRun::Similar => "a similar option",
                    LongRun::Better => "a better option",
                };
                t.push_str(&format!(" in the long-run is {option}."));
                if more_likely_to_die {
                    t.push_str(&also_die);
                }
            }
            if let Some((var, val)) = c.counterfactual {
                t.push_str(&format!(" However, if variable {} is {} I'd perform the suggested action.", var.ident(), val));
            }
        }
    }
    t
}
