package app;

import java.awt.event.ActionEvent;
import java.awt.event.ActionListener;
import javax.swing.JMenuItem;
import javax.swing.JTextArea;

public class EditMenu {
  private JTextArea output;

  ActionListener handler = new ActionListener() {
    @Override
    public void actionPerformed(ActionEvent e) {
      if (e.getSource() instanceof JMenuItem) {
        String cmd = e.getActionCommand();
        if (cmd.equals("Copy")) {
          output.copy();
        } else if (cmd.equals("Cut")) {
          output.cut();
        } else if (cmd.equals("Paste")) {
          output.paste();
        }
      }
    }
  };
}
