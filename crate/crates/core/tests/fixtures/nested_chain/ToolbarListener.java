import java.awt.event.ActionEvent;
import java.awt.event.ActionListener;
import javax.swing.JButton;
import javax.swing.JTextArea;

public class ToolbarListener implements ActionListener {
  private JTextArea output;

  public void actionPerformed(ActionEvent e) {
    Object src = e.getSource();
    if (src instanceof JButton) { // A
      String cmd = e.getActionCommand();
      if (cmd.equals("Copy")) { // B
        if (!output.getText().isEmpty()) { // C
          output.copy();
        }
      }
    }
  }
}
