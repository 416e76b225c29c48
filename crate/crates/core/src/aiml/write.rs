use std::fmt::Write;

use super::{AimlDocument, Category, RobotDirective, Segment};

// Canonical form: one category per line, no indentation inside categories,
// attributes double-quoted, childless star/get self-closed, robot directive
// last in its template.

fn escape_text(out: &mut String, text: &str) {
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '\r' => out.push_str("&#13;"),
            _ => out.push(c),
        }
    }
}

fn escape_attr(out: &mut String, text: &str) {
    for c in text.chars() {
        match c {
            '"' => out.push_str("&quot;"),
            '\n' => out.push_str("&#10;"),
            '\t' => out.push_str("&#9;"),
            _ => escape_text(out, c.encode_utf8(&mut [0; 4])),
        }
    }
}

fn write_segments(out: &mut String, segments: &[Segment]) {
    for segment in segments {
        match segment {
            Segment::Text(t) => escape_text(out, t),
            Segment::Star(1) => out.push_str("<star/>"),
            Segment::Star(i) => {
                let _ = write!(out, "<star index=\"{i}\"/>");
            }
            Segment::Get(name) => {
                out.push_str("<get name=\"");
                escape_attr(out, name);
                out.push_str("\"/>");
            }
            Segment::Set { name, value } => {
                out.push_str("<set name=\"");
                escape_attr(out, name);
                out.push_str("\">");
                write_segments(out, value);
                out.push_str("</set>");
            }
            Segment::Srai(inner) => {
                out.push_str("<srai>");
                write_segments(out, inner);
                out.push_str("</srai>");
            }
            Segment::Random(choices) => {
                out.push_str("<random>");
                for choice in choices {
                    out.push_str("<li>");
                    write_segments(out, choice);
                    out.push_str("</li>");
                }
                out.push_str("</random>");
            }
        }
    }
}

fn write_robot(out: &mut String, robot: &RobotDirective) {
    out.push_str("<robot>");
    if !robot.options.is_empty() {
        out.push_str("<options>");
        for option in &robot.options {
            out.push_str("<option>");
            escape_text(out, option);
            out.push_str("</option>");
        }
        out.push_str("</options>");
    }
    if let Some(image) = &robot.image {
        out.push_str("<image>");
        escape_text(out, image);
        out.push_str("</image>");
    }
    if let Some(video) = &robot.video {
        out.push_str("<video>");
        escape_text(out, video);
        out.push_str("</video>");
    }
    out.push_str("</robot>");
}

fn write_category(out: &mut String, cat: &Category) {
    out.push_str("<category><pattern>");
    let _ = write!(out, "{}", cat.pattern);
    out.push_str("</pattern>");
    if let Some(that) = &cat.that {
        let _ = write!(out, "<that>{that}</that>");
    }
    out.push_str("<template>");
    write_segments(out, &cat.template.segments);
    if let Some(robot) = &cat.template.robot {
        write_robot(out, robot);
    }
    out.push_str("</template></category>\n");
}

/// Serializes a document to canonical XML; parsing the output yields an
/// equal document.
pub fn to_canonical_xml(doc: &AimlDocument) -> String {
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<aiml>\n");
    for cat in &doc.categories {
        write_category(&mut out, cat);
    }
    out.push_str("</aiml>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::super::parse_aiml;
    use super::*;

    #[test]
    fn canonical_shape() {
        let doc = parse_aiml(
            "<aiml>\n  <category>\n    <pattern>my name is *</pattern>\n    <that>what is your name</that>\n    \
             <template>Hi <set name=\"name\"><star/></set> &amp; welcome<robot><image>a.png</image></robot></template>\n  </category>\n</aiml>",
            "t.aiml",
        )
        .unwrap();
        assert_eq!(
            to_canonical_xml(&doc),
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<aiml>\n\
             <category><pattern>MY NAME IS *</pattern><that>WHAT IS YOUR NAME</that>\
             <template>Hi <set name=\"name\"><star/></set> &amp; welcome<robot><image>a.png</image></robot></template></category>\n\
             </aiml>\n"
        );
    }
}
