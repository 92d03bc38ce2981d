import java.awt.event.ActionEvent;
import java.awt.event.ActionListener;
import javax.swing.JButton;
import javax.swing.JMenuItem;
import javax.swing.JTextArea;
import javax.swing.event.CaretEvent;
import javax.swing.event.CaretListener;

public class MenuListener
    implements ActionListener, CaretListener {
  protected boolean selectedText;
  protected JTextArea output;

  @Override
  public void actionPerformed(ActionEvent e) {
    Object src = e.getSource();
    if (src instanceof JMenuItem || src instanceof JButton) {
      String cmd = e.getActionCommand();
      if (cmd.equals("Copy")) { // Command #1
        if (selectedText)
          output.copy();
      } else if (cmd.equals("Cut")) { // Command #2
        output.cut();
      } else if (cmd.equals("Paste")) { // Command #3
        output.paste();
      }
      // etc.
    }
  }

  @Override
  public void caretUpdate(CaretEvent e) {
    selectedText = e.getDot() != e.getMark();
    updateStateOfMenus(selectedText);
  }

  private void updateStateOfMenus(boolean enabled) {
  }
}
