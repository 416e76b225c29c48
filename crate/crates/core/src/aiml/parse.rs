use std::fmt;

use roxmltree::{Document, Node, NodeType};

use super::{AimlDocument, Category, PatternExpr, RobotDirective, Segment, Template};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Location {
    pub source: String,
    pub line: u32,
    pub column: u32,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.source, self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("{source_name}: malformed XML: {message}")]
    XmlMalformed {
        source_name: String,
        message: String,
    },
    #[error("{at}: tag <{name}> is not allowed here")]
    UnknownTag { name: String, at: Location },
    #[error("{at}: pattern is empty after normalization")]
    EmptyPattern { at: Location },
    #[error("{at}: star index out of range for this pattern")]
    BadStarIndex { at: Location },
    #[error("{at}: robot tag carries no options, image or video")]
    EmptyRobotDirective { at: Location },
    #[error("{at}: random tag needs at least one <li>")]
    EmptyRandom { at: Location },
    #[error("{at}: <{element}> is empty")]
    EmptyValue { element: String, at: Location },
    #[error("{at}: <{element}> is missing")]
    MissingElement { element: String, at: Location },
    #[error("{at}: <{element}> appears more than once")]
    DuplicateElement { element: String, at: Location },
    #[error("{at}: <{element}> needs a `{attribute}` attribute")]
    MissingAttribute {
        element: String,
        attribute: String,
        at: Location,
    },
    #[error("{at}: unexpected text")]
    UnexpectedText { at: Location },
}

struct Ctx<'a> {
    doc: &'a Document<'a>,
    source: &'a str,
}

impl Ctx<'_> {
    fn at(&self, node: Node) -> Location {
        let pos = self.doc.text_pos_at(node.range().start);
        Location {
            source: self.source.to_string(),
            line: pos.row,
            column: pos.col,
        }
    }

    fn unknown(&self, node: Node) -> ParseError {
        ParseError::UnknownTag {
            name: node.tag_name().name().to_string(),
            at: self.at(node),
        }
    }

    /// Iterates child elements, rejecting non-whitespace text.
    fn elements<'n, 'i>(&self, node: Node<'n, 'i>) -> Result<Vec<Node<'n, 'i>>, ParseError> {
        let mut out = Vec::new();
        for child in node.children() {
            match child.node_type() {
                NodeType::Element => out.push(child),
                NodeType::Text if !child.text().unwrap_or("").trim().is_empty() => {
                    return Err(ParseError::UnexpectedText { at: self.at(child) });
                }
                _ => {}
            }
        }
        Ok(out)
    }

    /// Concatenated text content of an element that may hold only text.
    fn text_only(&self, node: Node) -> Result<String, ParseError> {
        let mut out = String::new();
        for child in node.children() {
            match child.node_type() {
                NodeType::Element => return Err(self.unknown(child)),
                NodeType::Text => out.push_str(child.text().unwrap_or("")),
                _ => {}
            }
        }
        Ok(out)
    }
}

/// Parses one extended-AIML file. Categories keep their file order.
pub fn parse_aiml(xml_text: &str, source_name: &str) -> Result<AimlDocument, ParseError> {
    let doc = Document::parse(xml_text).map_err(|e| ParseError::XmlMalformed {
        source_name: source_name.to_string(),
        message: e.to_string(),
    })?;
    let ctx = Ctx {
        doc: &doc,
        source: source_name,
    };
    let root = doc.root_element();
    if root.tag_name().name() != "aiml" {
        return Err(ctx.unknown(root));
    }
    let categories = ctx
        .elements(root)?
        .into_iter()
        .map(|node| match node.tag_name().name() {
            "category" => parse_category(&ctx, node),
            _ => Err(ctx.unknown(node)),
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(AimlDocument {
        source_name: source_name.to_string(),
        categories,
    })
}

fn set_once<'a, 'i>(
    ctx: &Ctx,
    slot: &mut Option<Node<'a, 'i>>,
    node: Node<'a, 'i>,
) -> Result<(), ParseError> {
    if slot.is_some() {
        return Err(ParseError::DuplicateElement {
            element: node.tag_name().name().to_string(),
            at: ctx.at(node),
        });
    }
    *slot = Some(node);
    Ok(())
}

fn parse_category(ctx: &Ctx, node: Node) -> Result<Category, ParseError> {
    let (mut pattern, mut that, mut template) = (None, None, None);
    for child in ctx.elements(node)? {
        match child.tag_name().name() {
            "pattern" => set_once(ctx, &mut pattern, child)?,
            "that" => set_once(ctx, &mut that, child)?,
            "template" => set_once(ctx, &mut template, child)?,
            _ => return Err(ctx.unknown(child)),
        }
    }
    let missing = |element: &str| ParseError::MissingElement {
        element: element.to_string(),
        at: ctx.at(node),
    };
    let pattern_node = pattern.ok_or_else(|| missing("pattern"))?;
    let template_node = template.ok_or_else(|| missing("template"))?;

    let pattern = parse_pattern(ctx, pattern_node)?;
    let that = that.map(|n| parse_pattern(ctx, n)).transpose()?;
    let template = parse_template(ctx, template_node, pattern.wildcard_count())?;
    Ok(Category {
        pattern,
        that,
        template,
    })
}

fn parse_pattern(ctx: &Ctx, node: Node) -> Result<PatternExpr, ParseError> {
    let text = ctx.text_only(node)?;
    PatternExpr::parse(&text).ok_or_else(|| ParseError::EmptyPattern { at: ctx.at(node) })
}

fn parse_template(ctx: &Ctx, node: Node, arity: usize) -> Result<Template, ParseError> {
    let mut robot_node = None;
    let mut segments = Vec::new();
    for child in node.children() {
        if child.is_element() && child.tag_name().name() == "robot" {
            set_once(ctx, &mut robot_node, child)?;
        } else {
            parse_segment(ctx, child, arity, &mut segments)?;
        }
    }
    let robot = robot_node.map(|n| parse_robot(ctx, n)).transpose()?;
    Ok(Template { segments, robot })
}

fn push_text(segments: &mut Vec<Segment>, text: &str) {
    if text.is_empty() {
        return;
    }
    if let Some(Segment::Text(prev)) = segments.last_mut() {
        prev.push_str(text);
    } else {
        segments.push(Segment::Text(text.to_string()));
    }
}

fn parse_children(ctx: &Ctx, node: Node, arity: usize) -> Result<Vec<Segment>, ParseError> {
    let mut segments = Vec::new();
    for child in node.children() {
        parse_segment(ctx, child, arity, &mut segments)?;
    }
    Ok(segments)
}

fn name_attr(ctx: &Ctx, node: Node) -> Result<String, ParseError> {
    node.attribute("name")
        .map(|n| n.trim().to_lowercase())
        .filter(|n| !n.is_empty())
        .ok_or_else(|| ParseError::MissingAttribute {
            element: node.tag_name().name().to_string(),
            attribute: "name".to_string(),
            at: ctx.at(node),
        })
}

fn parse_segment(
    ctx: &Ctx,
    node: Node,
    arity: usize,
    segments: &mut Vec<Segment>,
) -> Result<(), ParseError> {
    match node.node_type() {
        NodeType::Text => {
            push_text(segments, node.text().unwrap_or(""));
            return Ok(());
        }
        NodeType::Element => {}
        _ => return Ok(()),
    }
    let segment = match node.tag_name().name() {
        "star" => {
            let index = match node.attribute("index") {
                None => 1,
                Some(raw) => raw
                    .trim()
                    .parse::<usize>()
                    .map_err(|_| ParseError::BadStarIndex { at: ctx.at(node) })?,
            };
            if index == 0 || index > arity {
                return Err(ParseError::BadStarIndex { at: ctx.at(node) });
            }
            Segment::Star(index)
        }
        "get" => Segment::Get(name_attr(ctx, node)?),
        "set" => Segment::Set {
            name: name_attr(ctx, node)?,
            value: parse_children(ctx, node, arity)?,
        },
        "srai" => Segment::Srai(parse_children(ctx, node, arity)?),
        "random" => {
            let mut choices = Vec::new();
            for li in ctx.elements(node)? {
                if li.tag_name().name() != "li" {
                    return Err(ctx.unknown(li));
                }
                choices.push(parse_children(ctx, li, arity)?);
            }
            if choices.is_empty() {
                return Err(ParseError::EmptyRandom { at: ctx.at(node) });
            }
            Segment::Random(choices)
        }
        _ => return Err(ctx.unknown(node)),
    };
    segments.push(segment);
    Ok(())
}

fn media_value(ctx: &Ctx, node: Node) -> Result<String, ParseError> {
    let value = ctx.text_only(node)?.trim().to_string();
    if value.is_empty() {
        return Err(ParseError::EmptyValue {
            element: node.tag_name().name().to_string(),
            at: ctx.at(node),
        });
    }
    Ok(value)
}

fn parse_robot(ctx: &Ctx, node: Node) -> Result<RobotDirective, ParseError> {
    let (mut options_node, mut image, mut video) = (None, None, None);
    for child in ctx.elements(node)? {
        match child.tag_name().name() {
            "options" => set_once(ctx, &mut options_node, child)?,
            "image" => set_once(ctx, &mut image, child)?,
            "video" => set_once(ctx, &mut video, child)?,
            _ => return Err(ctx.unknown(child)),
        }
    }
    let mut options = Vec::new();
    if let Some(list) = options_node {
        for option in ctx.elements(list)? {
            if option.tag_name().name() != "option" {
                return Err(ctx.unknown(option));
            }
            options.push(media_value(ctx, option)?);
        }
    }
    let directive = RobotDirective {
        options,
        image: image.map(|n| media_value(ctx, n)).transpose()?,
        video: video.map(|n| media_value(ctx, n)).transpose()?,
    };
    if directive.is_empty() {
        return Err(ParseError::EmptyRobotDirective { at: ctx.at(node) });
    }
    Ok(directive)
}
