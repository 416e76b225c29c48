/// Cleans a response before it is sent: strips HTML tags, groups integers of
/// four or more digits with thousands separators, collapses whitespace.
pub fn postprocess(text: &str) -> String {
    let stripped = strip_tags(text);
    let grouped = group_digits(&stripped);
    grouped.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn strip_tags(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        let starts_tag = c == '<'
            && text[i + 1..]
                .chars()
                .next()
                .is_some_and(|n| n.is_ascii_alphabetic() || n == '/' || n == '!');
        if starts_tag {
            if let Some(close) = text[i..].find('>') {
                let end = i + close;
                while chars.peek().is_some_and(|&(j, _)| j <= end) {
                    chars.next();
                }
                continue;
            }
        }
        out.push(c);
    }
    out
}

fn group_digits(text: &str) -> String {
    let chars: Vec<char> = text.chars().collect();
    let mut out = String::with_capacity(text.len() + 8);
    let mut i = 0;
    while i < chars.len() {
        if !chars[i].is_ascii_digit() {
            out.push(chars[i]);
            i += 1;
            continue;
        }
        let start = i;
        while i < chars.len() && chars[i].is_ascii_digit() {
            i += 1;
        }
        let run = &chars[start..i];
        let before = start.checked_sub(1).map(|j| chars[j]);
        let after = chars.get(i).copied();
        let after_next = chars.get(i + 1).copied();
        let standalone = !before.is_some_and(|b| b.is_alphanumeric() || b == '.' || b == ',')
            && !after.is_some_and(|a| a.is_alphanumeric())
            && !(matches!(after, Some('.') | Some(','))
                && after_next.is_some_and(|n| n.is_ascii_digit()));
        if standalone && run.len() >= 4 {
            for (k, d) in run.iter().enumerate() {
                if k > 0 && (run.len() - k).is_multiple_of(3) {
                    out.push(',');
                }
                out.push(*d);
            }
        } else {
            out.extend(run);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strips_tags_and_spaces() {
        assert_eq!(postprocess("Great!  <b>Well</b> done."), "Great! Well done.");
        assert_eq!(postprocess("  a\n\t b  "), "a b");
        assert_eq!(postprocess("line<br/>break"), "linebreak");
        assert_eq!(postprocess("1 < 2 and 3 > 2"), "1 < 2 and 3 > 2");
    }

    #[test]
    fn groups_thousands() {
        assert_eq!(postprocess("You walked 10000 steps"), "You walked 10,000 steps");
        assert_eq!(postprocess("1234567."), "1,234,567.");
        assert_eq!(postprocess("only 999"), "only 999");
        assert_eq!(postprocess("pi is 3.14159"), "pi is 3.14159");
        assert_eq!(postprocess("room A1234"), "room A1234");
        assert_eq!(postprocess("already 10,000"), "already 10,000");
    }

    #[test]
    fn empty() {
        assert_eq!(postprocess(""), "");
    }
}
